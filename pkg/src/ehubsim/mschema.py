"""Model-friendly schema documents generated from the live store.

One JSON document per table captures columns, types, key relationships,
and a deterministic sample of example values; the rendered text form is
what gets embedded for retrieval.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .store import Datastore

DATABASE_ID = "emobility"


@dataclass(frozen=True)
class MSchemaDoc:
    doc_id: str
    table: str
    body: dict

    def to_json(self) -> str:
        """Canonical serialized form; parse-then-render is byte-stable."""
        return json.dumps(self.body, sort_keys=True, separators=(",", ": "),
                          ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "MSchemaDoc":
        body = json.loads(text)
        return cls(doc_id=body["table"], table=body["table"], body=body)

    @property
    def text_form(self) -> str:
        """Deterministic plain-text rendering used for embedding and prompts."""
        b = self.body
        lines = [f"[DB] {b['database']}",
                 f"[Table] {b['table']}: {b['description']}"]
        for col in b["columns"]:
            flags = []
            if col["primary_key"]:
                flags.append("PK")
            head = f"({col['name']}:{col['type']}"
            if flags:
                head += ", " + ", ".join(flags)
            head += ")"
            line = head
            if col.get("description"):
                line += f" {col['description']}"
            if col.get("examples"):
                line += f" examples: {json.dumps(col['examples'], ensure_ascii=False)}"
            lines.append(line)
        for fk in b.get("foreign_keys", []):
            lines.append(
                f"[FK] {b['table']}.{fk['column']} -> {fk['ref_table']}.{fk['ref_column']}"
            )
        return "\n".join(lines)


def generate_mschema(store: Datastore,
                     database_id: str = DATABASE_ID,
                     example_rows: int = 3) -> list[MSchemaDoc]:
    """One schema document per table, with example values sampled from the
    first ``example_rows`` rows in primary-key order."""
    docs = []
    for table in store.list_tables():
        schema = store.schema_for(table)
        pk = ", ".join(schema.primary_key())
        sample = store.execute_sql(
            f"SELECT * FROM {table} ORDER BY {pk} LIMIT {example_rows}"
        )
        by_col: dict[str, list] = {c: [] for c in sample.columns}
        for row in sample.rows:
            for cname, value in zip(sample.columns, row):
                if value is not None:
                    by_col[cname].append(value)
        columns = []
        for col in schema.columns:
            columns.append({
                "name": col.name,
                "type": col.logical_type,
                "primary_key": col.primary_key,
                "description": _column_description(table, col.name),
                "examples": by_col.get(col.name, []),
            })
        body = {
            "database": database_id,
            "table": table,
            "description": schema.description,
            "columns": columns,
            "foreign_keys": [
                {"column": c, "ref_table": t, "ref_column": rc}
                for c, t, rc in schema.foreign_keys
            ],
        }
        docs.append(MSchemaDoc(doc_id=table, table=table, body=body))
    return docs


_COLUMN_NOTES = {
    ("online_demo", "edge_id"): "network edge identifier",
    ("online_demo", "simulation_time"): "window start, seconds since scenario start",
    ("online_demo", "pedestrian_speed"): "mean walking speed in m/s, null if not walkable",
    ("online_demo", "bike_speed"): "mean bike/scooter speed in m/s",
    ("online_demo", "car_speed"): "mean car speed in m/s",
    ("stations", "station_id"): "docking station identifier",
    ("stations", "edge_id"): "edge the station is docked on",
    ("stations", "vehicle_id"): "docked vehicle identifier",
    ("stations", "vehicle_type"): "one of ebike, escooter, ecar",
    ("stations", "battery_level"): "state of charge in percent",
    ("user_paths", "path_id"): "trip identifier",
    ("user_paths", "start_edge"): "origin edge of the trip",
    ("user_paths", "end_edge"): "destination edge of the trip",
    ("user_paths", "time_cost_s"): "optimal travel time in seconds",
    ("user_paths", "execution_time_ms"): "route solver wall time in milliseconds",
    ("user_paths", "optimal_path_sequence"):
        "route as '(edge,mode)' groups joined by commas",
}


def _column_description(table: str, column: str) -> Optional[str]:
    return _COLUMN_NOTES.get((table, column))
