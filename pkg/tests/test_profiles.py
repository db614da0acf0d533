"""Durable profile store tests: upserts, restarts, compaction, save slots."""

import pytest

from cursedprince.netplay.profiles import (
    PlayerProfile,
    ProfileStore,
    StoreUnavailable,
    level_for_total_exp,
    record_result,
)


@pytest.fixture
def store_path(tmp_path):
    return tmp_path / "players.db"


class TestLevelFromExp:
    def test_thresholds(self):
        assert level_for_total_exp(0) == 1
        assert level_for_total_exp(49) == 1
        assert level_for_total_exp(50) == 2
        assert level_for_total_exp(149) == 2
        assert level_for_total_exp(150) == 3

    def test_matches_award_exp_cascade(self):
        # 40 + 110 lifetime exp lands at level 3 exactly like the combat rule
        assert level_for_total_exp(150) == 3


class TestStore:
    def test_create_on_first_upsert(self, store_path):
        store = ProfileStore(store_path)
        profile = record_result(store, "ayu", exp_delta=10)
        assert profile == PlayerProfile(name="ayu", total_exp=10, level=1, monsters_defeated=0)
        store.close()

    def test_two_upserts_accumulate(self, store_path):
        store = ProfileStore(store_path)
        record_result(store, "ayu", exp_delta=10)
        profile = record_result(store, "ayu", exp_delta=10)
        assert profile.total_exp == 20
        store.close()

    def test_read_after_write(self, store_path):
        store = ProfileStore(store_path)
        written = record_result(store, "ayu", exp_delta=60, monsters_delta=3)
        assert store.get("ayu") == written
        assert written.level == 2
        store.close()

    def test_survives_restart(self, store_path):
        store = ProfileStore(store_path)
        record_result(store, "ayu", exp_delta=70, monsters_delta=4)
        record_result(store, "bee", exp_delta=10, monsters_delta=1)
        store.close()
        reopened = ProfileStore(store_path)
        assert reopened.get("ayu") == PlayerProfile("ayu", total_exp=70, level=2, monsters_defeated=4)
        assert reopened.get("bee") == PlayerProfile("bee", total_exp=10, level=1, monsters_defeated=1)
        reopened.close()

    def test_level_invariant_after_every_upsert(self, store_path):
        store = ProfileStore(store_path)
        for _ in range(30):
            profile = record_result(store, "ayu", exp_delta=17)
            assert profile.level == level_for_total_exp(profile.total_exp)
        store.close()

    def test_closed_store_unavailable(self, store_path):
        store = ProfileStore(store_path)
        store.close()
        with pytest.raises(StoreUnavailable):
            record_result(store, "ayu", exp_delta=1)

    def test_compaction_preserves_content(self, store_path):
        store = ProfileStore(store_path)
        for i in range(50):
            record_result(store, "ayu", exp_delta=1)
        record_result(store, "bee", exp_delta=5)
        store.compact()
        assert store.get("ayu").total_exp == 50
        store.close()
        # after compaction the file holds one line per profile
        lines = [l for l in store_path.read_text().splitlines() if l.strip()]
        assert len(lines) == 2
        reopened = ProfileStore(store_path)
        assert reopened.get("ayu").total_exp == 50
        assert reopened.get("bee").total_exp == 5
        reopened.close()

    def test_auto_compaction_on_open(self, store_path):
        store = ProfileStore(store_path)
        for _ in range(100):
            record_result(store, "ayu", exp_delta=1)
        store.close()
        reopened = ProfileStore(store_path)  # 99 stale lines trigger a rewrite
        reopened.close()
        lines = [l for l in store_path.read_text().splitlines() if l.strip()]
        assert len(lines) == 1
        assert ProfileStore(store_path).get("ayu").total_exp == 100

    def test_torn_trailing_line_ignored(self, store_path):
        store = ProfileStore(store_path)
        record_result(store, "ayu", exp_delta=10)
        store.close()
        with open(store_path, "a", encoding="utf-8") as fh:
            fh.write('{"name": "bee", "total_')  # simulated torn write
        reopened = ProfileStore(store_path)
        assert reopened.get("ayu").total_exp == 10
        assert reopened.get("bee") is None
        reopened.close()

    def test_save_slot_round_trip_and_restart(self, store_path):
        store = ProfileStore(store_path)
        store.set_save("ayu", b"\x00saved bytes\xff")
        assert store.get_save("ayu") == b"\x00saved bytes\xff"
        store.close()
        reopened = ProfileStore(store_path)
        assert reopened.get_save("ayu") == b"\x00saved bytes\xff"
        reopened.close()
