from datetime import datetime, timedelta, timezone
from io import StringIO

import pytest
from hypothesis import given, strategies as st

from topiclife.corpus import (
    ParseStats,
    Slotting,
    SocialGraph,
    assign_timeslot,
    count_hashtag_usage,
    default_epoch,
    extract_hashtags,
    filter_hashtags,
    load_social_graph,
    parse_tweet_stream,
    read_tweets,
    open_maybe_gzip,
    Tweet,
)
from topiclife.errors import ConfigurationError

UTC = timezone.utc


def make_tweet(text, author="u", ts=None, seq=0):
    ts = ts or datetime(2009, 6, 11, tzinfo=UTC)
    return Tweet(seq, author, ts, text, extract_hashtags(text))


RECORD = "T\t2009-06-11 00:00:03\nU\thttp://twitter.com/alice\nW\tsave the whales #green\n"


class TestParseTweetStream:
    def test_single_record(self):
        stats = ParseStats()
        tweets = list(parse_tweet_stream(StringIO(RECORD), stats))
        assert len(tweets) == 1
        t = tweets[0]
        assert t.author == "alice"
        assert t.hashtags == ["green"]
        assert t.timestamp == datetime(2009, 6, 11, 0, 0, 3, tzinfo=UTC)
        assert t.text == "save the whales #green"
        assert stats.parsed == 1 and stats.malformed_skipped == 0

    def test_no_hashtags(self):
        src = "T\t2009-06-11 00:00:03\nU\thttp://twitter.com/bob\nW\tNo tags here\n"
        (t,) = parse_tweet_stream(StringIO(src))
        assert t.hashtags == []

    def test_malformed_among_three(self):
        good = RECORD
        bad = "T\tnot a timestamp\nU\thttp://twitter.com/x\nW\thi\n"
        stats = ParseStats()
        tweets = list(parse_tweet_stream(StringIO(good + "\n" + bad + "\n" + good), stats))
        assert len(tweets) == 2
        assert stats.malformed_skipped == 1
        assert stats.parsed == 2

    def test_wrong_line_count_is_malformed(self):
        stats = ParseStats()
        assert list(parse_tweet_stream(StringIO("T\t2009-06-11 00:00:03\nW\thi\n"), stats)) == []
        assert stats.malformed_skipped == 1

    def test_gzip_roundtrip(self, tmp_path):
        import gzip

        plain = tmp_path / "t.txt"
        plain.write_text(RECORD)
        gz = tmp_path / "t.txt.gz"
        with gzip.open(gz, "wt") as fh:
            fh.write(RECORD)
        assert [t.author for t in read_tweets(plain)] == ["alice"]
        assert [t.author for t in read_tweets(gz)] == ["alice"]


class TestExtractHashtags:
    def test_paper_example(self):
        assert extract_hashtags("I love him #Obama") == ["Obama"]

    def test_empty(self):
        assert extract_hashtags("") == []

    def test_duplicates_and_case(self):
        assert extract_hashtags("#mj and #mj again #MJ") == ["mj", "mj", "MJ"]

    def test_punctuation_terminates_token(self):
        assert extract_hashtags("end #tag! then #a_b2") == ["tag", "a_b2"]


class TestCounting:
    def test_two_tweets(self):
        tweets = [make_tweet("a #mj"), make_tweet("b #mj")]
        assert count_hashtag_usage(tweets) == {"mj": 2}

    def test_double_within_one_tweet(self):
        assert count_hashtag_usage([make_tweet("#mj #mj")]) == {"mj": 2}

    def test_empty_corpus(self):
        assert count_hashtag_usage([]) == {}


class TestFilter:
    def test_inclusive_bounds(self):
        counts = {"a": 39, "b": 40, "c": 1000, "d": 1001}
        assert filter_hashtags(counts) == {"b", "c"}

    def test_empty(self):
        assert filter_hashtags({}) == set()

    def test_bad_bounds(self):
        with pytest.raises(ConfigurationError):
            filter_hashtags({}, min_count=5, max_count=4)

    @given(
        st.dictionaries(st.text(min_size=1, max_size=4), st.integers(0, 100), max_size=20),
        st.integers(0, 50),
        st.integers(0, 30),
        st.integers(0, 30),
    )
    def test_monotone_in_bounds(self, counts, lo, shrink, grow):
        hi = lo + shrink
        narrow = filter_hashtags(counts, lo, hi)
        wide = filter_hashtags(counts, max(0, lo - grow), hi + grow)
        assert narrow <= wide


class TestTimeslots:
    epoch = datetime(2009, 6, 11, tzinfo=UTC)
    day = timedelta(days=1)

    def test_epoch_is_slot_zero(self):
        assert assign_timeslot(self.epoch, self.epoch, self.day) == 0

    def test_floor_boundary(self):
        assert assign_timeslot(self.epoch + self.day - timedelta(seconds=1), self.epoch, self.day) == 0

    def test_exact_boundary(self):
        assert assign_timeslot(self.epoch + self.day, self.epoch, self.day) == 1

    def test_before_epoch_raises(self):
        with pytest.raises(ValueError):
            assign_timeslot(self.epoch - timedelta(seconds=1), self.epoch, self.day)

    @given(st.lists(st.integers(0, 10**6), min_size=1, max_size=50))
    def test_partition_of_time(self, offsets):
        slotting = Slotting(self.epoch)
        stamps = sorted(self.epoch + timedelta(seconds=s) for s in offsets)
        indices = [slotting.index_of(t) for t in stamps]
        assert indices == sorted(indices)

    def test_default_epoch_is_midnight(self):
        ts = datetime(2009, 6, 14, 17, 30, tzinfo=UTC)
        assert default_epoch([ts]) == datetime(2009, 6, 14, tzinfo=UTC)


class TestSocialGraph:
    def test_dedup_selfloop_induction(self):
        lines = ["a\tb", "b\ta", "a\ta", "a\tc"]
        g = load_social_graph(lines, {"a", "b"})
        assert g.nodes == {"a", "b"}
        assert list(g.edges()) == [("a", "b")]

    def test_empty_retained(self):
        g = load_social_graph(["a\tb"], set())
        assert g.node_count == 0 and g.edge_count == 0

    def test_half_retained_edge_dropped(self):
        g = load_social_graph(["a\tb"], {"a"})
        assert g.nodes == {"a"} and g.edge_count == 0

    def test_malformed_lines_counted(self):
        stats = ParseStats()
        load_social_graph(["a\tb", "onlyone", "a\tb\tc"], {"a", "b"}, stats)
        assert stats.malformed_skipped == 2

    def test_induction_idempotent(self):
        g = SocialGraph()
        for a, b in [("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")]:
            g.add_edge(a, b)
        once = g.induced_subgraph({"a", "b", "c"})
        twice = once.induced_subgraph({"a", "b", "c"})
        assert once.adjacency == twice.adjacency
