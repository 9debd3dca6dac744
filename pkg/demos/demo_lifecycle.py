"""Show dominant-hashtag morphs and topic death on a hand-built timeline.

Constructs per-slot usage counts for one topic in two community scopes: the
dominant hashtag switches mid-window in scope community:0, and the topic
stops being used entirely in community:1 -- the same contrast the full
pipeline reports from a real corpus.

Run: python3 demos/demo_lifecycle.py
"""

from topiclife import UsageTimeline, lifecycle_report
from topiclife.timeline import OVERALL, community_scope


def main() -> None:
    topics = {"topic-a": {"oldname", "newname"}}
    c0, c1 = community_scope(0), community_scope(1)
    counts = {}
    # community 0: 'oldname' dominates slots 0-2, 'newname' takes over at 3
    for slot, (old, new) in enumerate([(9, 1), (8, 2), (7, 3), (2, 8), (1, 9), (0, 9)]):
        if old:
            counts[(c0, slot, "oldname")] = old
        if new:
            counts[(c0, slot, "newname")] = new
    # community 1: steady usage that stops after slot 3
    for slot, n in enumerate([5, 6, 4, 3, 0, 0]):
        if n:
            counts[(c1, slot, "oldname")] = n
    for (scope, slot, tag), n in list(counts.items()):
        key = (OVERALL, slot, tag)
        counts[key] = counts.get(key, 0) + n

    timeline = UsageTimeline(counts, topics, 6, {OVERALL, c0, c1})

    for scope in (c0, c1):
        doms = timeline.dominant_series("topic-a", scope)
        print(f"{scope}: dominant per slot = {doms}")
        for event in timeline.detect_morphs("topic-a", scope):
            print(
                f"  morph at slots {event.slot_from}->{event.slot_to}: "
                f"{event.dominant_from} -> {event.dominant_to}"
            )
        fate = timeline.detect_death("topic-a", scope)
        print(f"  fate: {fate.status}" + (f" (slot {fate.death_slot})" if fate.death_slot is not None else ""))

    report = lifecycle_report(timeline)
    print("\ncross-community contrasts:", report["cross_community_contrasts"])


if __name__ == "__main__":
    main()
