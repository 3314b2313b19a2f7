#!/usr/bin/env python3
"""The adaptive two-agent game ending above ratio 2 - eps, against any policy.

The emitted values react to the policy's choices: agent 1's value explodes
after every skip (so she can never take twice in a row), and agent 2's value
grows geometrically until her first take, after which she is fed echoes and
crumbs. Every escape route ends in an explicit certificate: a witness
partition whose max bundle bounds the MMS from above while the realized
bundle is nearly twice that.
"""
from fractions import Fraction as F

from fairdiv import TwoAgentAdversary, play_game, verify_certificate
from fairdiv.allocator import make_policy
from fairdiv.core import format_rational

for name in ["pressure-greedy", "round-robin", "dump-to-one", "mixture:99"]:
    result = play_game(TwoAgentAdversary(F(1, 2)), make_policy(name), budget=10_000)
    cert = result.certificate
    print(f"{name:16s} ended after {result.rounds} rounds")
    for j, d in enumerate(result.instance.items, start=1):
        mark = "*" if result.allocation.assignment[j - 1] == cert.agent else " "
        print(f"    item {j}: d1={format_rational(d[0]):>8s} d2={format_rational(d[1]):>8s} "
              f"-> agent {result.allocation.assignment[j - 1]}{mark}")
    print(f"    certificate: agent {cert.agent} carries {format_rational(cert.d_A)} "
          f"vs MMS <= {format_rational(cert.mms_upper)} ({cert.mms_source})")
    print(f"    ratio_lower = {format_rational(cert.ratio_lower)} > 3/2; "
          f"sound = {verify_certificate(result.instance, result.allocation, cert)}\n")
