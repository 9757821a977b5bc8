#!/usr/bin/env python3
"""Run the three detection pipelines on the pinned towers and print the
JSON reports; a quick end-to-end sanity drive of the library."""

import json
import sys

from valdetect.characters import Character, CharacterGroup
from valdetect.detect import (
    class_membership,
    detect_from_cgroup,
    detect_from_cpair,
    detect_inertia,
)
from valdetect.fields import ValuationHandle, parse_field, parse_window


def dump(title, payload):
    print(f"== {title}")
    print(json.dumps(payload, sort_keys=True, indent=2))


def main():
    L = parse_field("laurent(gf:7,t)")
    wl = parse_window(L, "{ell=3,n=1,gens=[t,const]}")
    rep = detect_from_cpair(Character.dual_by_label(wl, "t"),
                            Character.dual_by_label(wl, "const"), 1, 8)
    dump("C-pair detection on F7((t))", rep.payload())

    S = parse_field("laurent(laurent(gf:7,s),t)")
    ws = parse_window(S, "{ell=3,n=1,gens=[t,s,const]}")
    rep = detect_from_cgroup(CharacterGroup.full(ws), 1, 8)
    dump("C-group detection on F7((s))((t))", rep.payload())

    M = parse_field("laurent(ratfunc(gf:7,u),t)")
    wm = parse_window(M, "{ell=3,n=1,gens=[t,u,u-3]}")
    ft = Character.dual_by_label(wm, "t")
    rep = detect_inertia(CharacterGroup(wm, (ft,)),
                         CharacterGroup.full(wm), 1, 4)
    dump("inertia detection on F7(u)((t))", rep.payload())

    for steps in (["t"], ["t", "s"]):
        handle = ValuationHandle.from_steps(S, steps)
        dump(f"classification of {handle.spec()} on F7((s))((t))",
             class_membership(handle, ws, 1, 8).payload())
    return 0


if __name__ == "__main__":
    sys.exit(main())
