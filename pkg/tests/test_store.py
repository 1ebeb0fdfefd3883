import threading

import pytest

from ehubsim.errors import (
    AlreadyInitialized,
    DuplicateKey,
    NoDataYet,
    NotReadOnly,
    SqlSyntaxError,
    StoreError,
    UnknownRelation,
)
from ehubsim.network import AgentClass
from ehubsim.store import (
    Datastore,
    EdgeTrafficRecord,
    IngestBatch,
    PLATFORM_SCHEMAS,
)


def record(edge, t, ped=1.3, bike=4.2, car=9.5):
    return EdgeTrafficRecord(edge, t, ped, bike, car)


@pytest.fixture()
def store():
    s = Datastore()
    s.init_schema()
    return s


class TestSchema:
    def test_three_tables_listable(self, store):
        assert store.list_tables() == ["online_demo", "stations", "user_paths"]

    def test_double_init_rejected(self, store):
        with pytest.raises(AlreadyInitialized):
            store.init_schema()

    def test_introspection_matches_contract(self, store):
        for schema in PLATFORM_SCHEMAS:
            cols = store.table_columns(schema.name)
            assert [c[0] for c in cols] == schema.column_names()
            assert [c[0] for c in cols if c[2]] == schema.primary_key()
            assert [c[1] for c in cols] == [
                {"text": "text", "integer": "integer", "real": "real"}[
                    c.logical_type] for c in schema.columns]


class TestIngest:
    def test_batch_writes_all_rows(self, store):
        records = tuple(record(f"E{i:03d}", 0) for i in range(500))
        assert store.ingest(IngestBatch(records)) == 500
        assert store.execute_sql("SELECT COUNT(*) FROM online_demo").rows == [(500,)]

    def test_duplicate_key_atomic(self, store):
        store.ingest(IngestBatch((record("E1", 0),)))
        batch = IngestBatch((record("E0", 0), record("E1", 0)))
        with pytest.raises(DuplicateKey):
            store.ingest(batch)
        # nothing from the failed batch may remain
        assert store.execute_sql(
            "SELECT COUNT(*) FROM online_demo").rows == [(1,)]

    def test_batch_must_be_sorted(self):
        with pytest.raises(StoreError):
            IngestBatch((record("E2", 0), record("E1", 0)))

    def test_batch_size_cap(self):
        records = tuple(record(f"E{i:04d}", 0) for i in range(501))
        with pytest.raises(StoreError):
            IngestBatch(records)

    def test_empty_batch_rejected(self):
        with pytest.raises(StoreError):
            IngestBatch(())


class TestExecuteSql:
    def test_count_on_seeded_fixture(self, fixture_store):
        result = fixture_store.execute_sql("SELECT COUNT(*) FROM stations")
        assert result.rows == [(7,)]

    def test_station_count_query(self, fixture_store):
        result = fixture_store.execute_sql(
            "SELECT edge_id, COUNT(*) AS station_count FROM stations "
            "GROUP BY edge_id ORDER BY station_count DESC LIMIT 1;")
        assert result.rows == [("E3", 3)]
        assert result.columns == ["edge_id", "station_count"]

    def test_non_select_rejected(self, fixture_store):
        with pytest.raises(NotReadOnly):
            fixture_store.execute_sql("DROP TABLE stations")

    def test_unknown_relation(self, fixture_store):
        with pytest.raises(UnknownRelation):
            fixture_store.execute_sql("SELECT * FROM nope")

    def test_syntax_error(self, fixture_store):
        with pytest.raises(SqlSyntaxError):
            fixture_store.execute_sql("SELECT FROM WHERE")

    def test_multi_statement_rejected(self, fixture_store):
        with pytest.raises(NotReadOnly):
            fixture_store.execute_sql("SELECT 1; DROP TABLE stations")

    def test_string_functions_supported(self, fixture_store):
        result = fixture_store.execute_sql(
            "SELECT path_id FROM user_paths WHERE "
            "LENGTH(optimal_path_sequence) - "
            "LENGTH(REPLACE(optimal_path_sequence, '(', '')) > 4")
        assert result.rows == [(1,)]

    def test_deterministic_for_fixed_data(self, fixture_store):
        sql = "SELECT * FROM user_paths ORDER BY path_id"
        assert fixture_store.execute_sql(sql).rows == \
            fixture_store.execute_sql(sql).rows


class TestReadOnlyGuarantee:
    def test_checksum_stable_over_many_selects(self, fixture_store):
        before = fixture_store.checksum()
        statements = [
            "SELECT * FROM stations",
            "SELECT AVG(battery_level) FROM stations",
            "SELECT * FROM user_paths WHERE time_cost_s > 100",
            "SELECT COUNT(*) FROM online_demo",
        ]
        for i in range(1000):
            fixture_store.execute_sql(statements[i % len(statements)])
        assert fixture_store.checksum() == before

    def test_write_attempts_leave_store_unchanged(self, fixture_store):
        before = fixture_store.checksum()
        for sql in ADVERSARIAL_STATEMENTS:
            with pytest.raises((NotReadOnly, SqlSyntaxError, UnknownRelation)):
                fixture_store.execute_sql(sql)
        assert fixture_store.checksum() == before


ADVERSARIAL_STATEMENTS = [
    "DROP TABLE stations",
    "DROP TABLE online_demo",
    "DROP TABLE user_paths",
    "DELETE FROM stations",
    "DELETE FROM online_demo WHERE edge_id = 'E1'",
    "INSERT INTO stations VALUES ('X','E1','V','ebike',50)",
    "INSERT INTO user_paths (start_edge) VALUES ('E1')",
    "UPDATE stations SET battery_level = 0",
    "UPDATE user_paths SET time_cost_s = 0 WHERE path_id = 1",
    "CREATE TABLE evil (a int)",
    "CREATE INDEX idx ON stations (edge_id)",
    "ALTER TABLE stations ADD COLUMN hacked int",
    "PRAGMA writable_schema = 1",
    "ATTACH DATABASE ':memory:' AS other",
    "DETACH DATABASE other",
    "VACUUM",
    "REINDEX",
    "ANALYZE",
    "BEGIN",
    "BEGIN TRANSACTION",
    "COMMIT",
    "ROLLBACK",
    "SAVEPOINT sp1",
    "RELEASE sp1",
    "REPLACE INTO stations VALUES ('X','E1','V','ebike',50)",
    "INSERT OR REPLACE INTO stations VALUES ('X','E1','V','ebike',50)",
    "CREATE VIEW v AS SELECT * FROM stations",
    "DROP VIEW IF EXISTS v",
    "CREATE TRIGGER t AFTER INSERT ON stations BEGIN SELECT 1; END",
    "DROP TRIGGER IF EXISTS t",
    "CREATE VIRTUAL TABLE ft USING fts5(x)",
    "WITH w AS (SELECT 1) INSERT INTO stations SELECT 'X','E1','V','e',1 FROM w",
    "WITH w AS (SELECT 1) DELETE FROM stations",
    "WITH w AS (SELECT 1) UPDATE stations SET battery_level = 1",
    "SELECT 1; DELETE FROM stations",
    "SELECT 1; SELECT 2",
    "  DROP TABLE stations",
    "-- harmless comment\nDROP TABLE stations",
    "/* sneaky */ DELETE FROM user_paths",
    "dRoP TABLE stations",
    "insert into stations values ('X','E1','V','ebike',50)",
    "EXPLAIN QUERY PLAN DELETE FROM stations",
    "CREATE TEMP TABLE tt (a int)",
    "CREATE TEMPORARY TABLE tt2 (a int)",
    "ALTER TABLE user_paths RENAME TO paths2",
    "UPDATE online_demo SET car_speed = NULL",
    "INSERT INTO online_demo VALUES ('Z', 99999, 1, 1, 1)",
    "DELETE FROM user_paths",
    "PRAGMA journal_mode = DELETE",
    "SELECT * FROM stations; VACUUM",
]


def test_adversarial_list_has_fifty():
    assert len(ADVERSARIAL_STATEMENTS) == 50


class TestSnapshot:
    def test_no_data_yet(self, store):
        with pytest.raises(NoDataYet):
            store.snapshot_traffic(0)

    def test_boundary_window(self, store):
        store.ingest(IngestBatch((record("E1", 0, car=9.0),)))
        store.ingest(IngestBatch((record("E1", 360, car=5.0),)))
        snap = store.snapshot_traffic(360)
        assert snap["E1"][AgentClass.CAR] == 5.0

    def test_mid_window_uses_previous(self, store):
        store.ingest(IngestBatch((record("E1", 0, car=9.0),)))
        store.ingest(IngestBatch((record("E1", 360, car=5.0),)))
        snap = store.snapshot_traffic(359)
        assert snap["E1"][AgentClass.CAR] == 9.0


class TestRoundTrip:
    def test_ordered_select_reproduces_batch(self, store):
        records = []
        for t in (0, 360):
            for i in range(10):
                records.append(record(f"E{i:02d}", t, ped=1.0 + i * 0.01,
                                      bike=4.0 + i * 0.1, car=None))
        store.ingest_records(records)
        result = store.execute_sql(
            "SELECT edge_id, simulation_time, pedestrian_speed, bike_speed, "
            "car_speed FROM online_demo ORDER BY simulation_time, edge_id")
        assert result.rows == [r.as_tuple() for r in records]

    def test_concurrent_reads_during_writes(self, store):
        # single writer, several readers; no errors and final count exact
        errors = []

        def reader():
            try:
                for _ in range(50):
                    store.execute_sql("SELECT COUNT(*) FROM online_demo")
            except Exception as exc:  # pragma: no cover
                errors.append(exc)

        threads = [threading.Thread(target=reader) for _ in range(4)]
        for t in threads:
            t.start()
        for t in range(20):
            batch = tuple(record(f"E{i:02d}", t) for i in range(20))
            store.ingest(IngestBatch(batch))
        for t in threads:
            t.join()
        assert not errors
        assert store.execute_sql(
            "SELECT COUNT(*) FROM online_demo").rows == [(400,)]
