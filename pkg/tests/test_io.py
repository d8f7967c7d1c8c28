"""Interchange files: round trips, version checks, positioned diagnostics."""

import json

import pytest

from cgprune import (
    HierarchyValidationError,
    RecordFormatError,
    SchemaVersionError,
    apply_core_prefixes,
    load_call_graph,
    load_hierarchy,
    save_call_graph,
    save_hierarchy,
    validate_hierarchy,
)
from cgprune.io import SCHEMA_VERSION


class TestHierarchyRoundTrip:
    def test_f1_round_trip_is_identity(self, f1, tmp_path):
        path = tmp_path / "h.jsonl"
        save_hierarchy(f1.h, str(path))
        assert load_hierarchy(str(path)) == f1.h

    def test_save_is_byte_stable(self, f1, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        save_hierarchy(f1.h, str(a))
        save_hierarchy(f1.h, str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_header_carries_schema_and_projects(self, f1, tmp_path):
        path = tmp_path / "h.jsonl"
        save_hierarchy(f1.h, str(path))
        header = json.loads(path.read_text().splitlines()[0])
        assert header["schema"] == SCHEMA_VERSION
        assert header["content"] == "hierarchy"
        assert header["projects"] == ["app", "jre", "lib"]
        assert header["core_project"] == "jre"


class TestCallGraphRoundTrip:
    def test_f1_round_trip_is_identity(self, f1, tmp_path):
        path = tmp_path / "cg.jsonl"
        save_call_graph(f1.cg, str(path))
        loaded = load_call_graph(str(path), f1.h)
        assert loaded.nodes == f1.cg.nodes
        assert loaded.edges == f1.cg.edges

    def test_isolated_nodes_survive(self, f1, tmp_path):
        # m(T1,hasNext) has no edges and must still round-trip
        path = tmp_path / "cg.jsonl"
        save_call_graph(f1.cg, str(path))
        from conftest import m

        assert m("T1", "hasNext") in load_call_graph(str(path), f1.h).nodes


class TestSchemaAndFormatErrors:
    def _write(self, tmp_path, lines):
        path = tmp_path / "bad.jsonl"
        path.write_text("\n".join(lines) + "\n")
        return str(path)

    def test_unknown_schema_version_names_both(self, f1, tmp_path):
        path = self._write(tmp_path, [
            '{"kind":"header","schema":99,"content":"hierarchy"}',
        ])
        with pytest.raises(SchemaVersionError) as exc:
            load_hierarchy(path)
        assert "99" in str(exc.value)
        assert str(SCHEMA_VERSION) in str(exc.value)

    def test_invalid_json_is_positioned(self, f1, tmp_path):
        path = self._write(tmp_path, [
            '{"kind":"header","schema":1,"content":"hierarchy"}',
            "{not json",
        ])
        with pytest.raises(RecordFormatError, match="bad.jsonl:2"):
            load_hierarchy(path)

    def test_missing_field_is_positioned(self, f1, tmp_path):
        path = self._write(tmp_path, [
            '{"kind":"header","schema":1,"content":"hierarchy"}',
            '{"kind":"type","id":"T0"}',
        ])
        with pytest.raises(RecordFormatError, match="missing field"):
            load_hierarchy(path)

    def test_wrong_content_kind(self, f1, tmp_path):
        path = tmp_path / "h.jsonl"
        save_hierarchy(f1.h, str(path))
        with pytest.raises(RecordFormatError, match="expected a callgraph"):
            load_call_graph(str(path), f1.h)

    def test_empty_file(self, tmp_path):
        path = self._write(tmp_path, [""])
        with pytest.raises(RecordFormatError, match="missing header"):
            load_hierarchy(path)

    def test_duplicate_type_id(self, tmp_path):
        record = (
            '{"kind":"type","id":"T0","fq":"x.T0","parents":[],'
            '"declares":[],"project":"p","package":"x","core":false}'
        )
        path = self._write(tmp_path, [
            '{"kind":"header","schema":1,"content":"hierarchy"}',
            record,
            record,
        ])
        with pytest.raises(RecordFormatError, match="duplicate type id"):
            load_hierarchy(path)

    def test_unknown_record_kind(self, f1, tmp_path):
        path = self._write(tmp_path, [
            '{"kind":"header","schema":1,"content":"callgraph"}',
            '{"kind":"mystery"}',
        ])
        with pytest.raises(RecordFormatError, match="mystery"):
            load_call_graph(path, f1.h)


class TestLoadValidation:
    def test_dangling_parent_rejected_by_name(self, tmp_path):
        path = tmp_path / "h.jsonl"
        path.write_text("\n".join([
            '{"kind":"header","schema":1,"content":"hierarchy"}',
            '{"kind":"type","id":"T2","fq":"x.T2","parents":["T9"],'
            '"declares":[],"project":"p","package":"x","core":false}',
        ]) + "\n")
        with pytest.raises(HierarchyValidationError, match="T9"):
            load_hierarchy(str(path))

    def test_callgraph_with_unknown_type_names_the_id(self, f1, tmp_path):
        path = tmp_path / "cg.jsonl"
        path.write_text("\n".join([
            '{"kind":"header","schema":1,"content":"callgraph"}',
            '{"kind":"edge","src":"T4::run():void","dst":"T9::next():void",'
            '"recv":"T1"}',
        ]) + "\n")
        with pytest.raises(HierarchyValidationError, match="T9"):
            load_call_graph(str(path), f1.h)


class TestApplyCorePrefixes:
    def test_matching_types_become_core(self, f1):
        marked = apply_core_prefixes(f1.h, ["org.lib"])
        assert marked.types["T3"].is_core_lib
        assert marked.types["T3"].project_id == "jre"
        assert not marked.types["T4"].is_core_lib

    def test_result_still_validates(self, f1):
        assert validate_hierarchy(apply_core_prefixes(f1.h, ["com.app"])) == []

    def test_no_prefixes_is_identity(self, f1):
        assert apply_core_prefixes(f1.h, []) is f1.h
