import pytest

from chainbell import fixtures


class TestIntegrity:
    @pytest.mark.parametrize("name", fixtures.TABLE_NAMES)
    def test_checksum_matches_manifest(self, name):
        assert fixtures.table_sha256(name) == fixtures.CHECKSUMS[name]

    @pytest.mark.parametrize("name", fixtures.TABLE_NAMES)
    def test_citation_present(self, name):
        table = fixtures.load_table(name)
        assert table["name"] == name
        assert table["citation"].strip()
        assert table["description"].strip()

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError, match="unknown fixture"):
            fixtures.load_table("table_missing")

    def test_list_tables(self):
        entries = fixtures.list_tables()
        assert [e["name"] for e in entries] == list(fixtures.TABLE_NAMES)


class TestAdapters:
    def test_n3_stats(self):
        params, mode, stats = fixtures.pair_stats_n3()
        assert params.N == 3
        assert mode == "anticorrelation"
        assert len(stats) == 6
        assert stats[(1, 1)].count == 2500
        assert all(0.0 <= st.mean <= 1.0 for st in stats.values())

    def test_n8_stats(self):
        params, mode, stats = fixtures.pair_stats_n8()
        assert params.N == 8
        assert mode == "correlation"
        assert len(stats) == 16

    def test_n6_stats_both_column_sets(self):
        params, mode, stats_all = fixtures.pair_stats_n6("all")
        assert params.N == 6
        assert mode == "correlation"
        assert len(stats_all) == 12
        _, _, stats_50 = fixtures.pair_stats_n6("50th")
        assert sum(st.count for st in stats_50.values()) == 1361
        assert all(
            stats_50[key].count <= stats_all[key].count for key in stats_all
        )
        with pytest.raises(ValueError):
            fixtures.pair_stats_n6("25th")

    def test_n6_score_statistic(self):
        assert fixtures.t_statistic_n6_50th() == (1334, 1361)

    def test_chsh_table_contains_trapped_ion_row(self):
        table = fixtures.load_table("table_chsh_experiments")
        rows = {r[0]: r for r in table["rows"]}
        ours = rows["Two 9Be+ (this experiment)"]
        assert ours[1] == pytest.approx(2.80)
        assert ours[2] == pytest.approx(0.02)
