from __future__ import annotations

import json

import pytest

from aihm.catalog import (
    HazardLevel,
    HazardMode,
    LifecycleStage,
    load_catalog,
    validate_catalog,
)
from aihm.errors import HazardManagementError

STAGE_MEMBERSHIP = {
    1: ["AIH1", "AIH2", "AIH3", "AIH4", "AIH5", "AIH6", "AIH16"],
    2: ["AIH1", "AIH4", "AIH7", "AIH8", "AIH9", "AIH10", "AIH11", "AIH12", "AIH13", "AIH14", "AIH15"],
    3: ["AIH3", "AIH4", "AIH8", "AIH16", "AIH17", "AIH18", "AIH19", "AIH20", "AIH21"],
    4: ["AIH1", "AIH2", "AIH3", "AIH5", "AIH6", "AIH22"],
    5: ["AIH1", "AIH2", "AIH3", "AIH5", "AIH6", "AIH23", "AIH24"],
}


def minimal_doc(**overrides):
    doc = {
        "version": "0.0.1",
        "hazards": [
            {
                "id": "AIH1",
                "title": "t",
                "description": "d",
                "stages": [1],
                "mode": "procedural",
                "level": "system",
                "references": [],
            }
        ],
    }
    doc.update(overrides)
    return doc


def test_bundled_catalog_has_24_unique_hazards(catalog):
    assert len(catalog.hazards) == 24
    assert len({h.id for h in catalog.hazards}) == 24
    assert validate_catalog(catalog) == []


def test_bundled_mode_counts(catalog):
    counts = {mode: len(catalog.query(mode=mode)) for mode in HazardMode}
    assert counts[HazardMode.PROCEDURAL] == 10
    assert counts[HazardMode.TECHNICAL] == 11
    assert counts[HazardMode.SOCIO_TECHNICAL] == 3


def test_bundled_level_counts(catalog):
    assert len(catalog.query(level=HazardLevel.APPLICATION)) == 5
    assert len(catalog.query(level=HazardLevel.SYSTEM)) == 19


@pytest.mark.parametrize("stage,expected", sorted(STAGE_MEMBERSHIP.items()))
def test_stage_membership(catalog, stage, expected):
    assert [h.id for h in catalog.filter_by_stage(stage)] == expected


def test_application_level_ids(catalog):
    assert [h.id for h in catalog.query(level="application")] == ["AIH1", "AIH2", "AIH5", "AIH6", "AIH22"]


def test_socio_technical_ids(catalog):
    assert [h.id for h in catalog.query(mode="socio-technical")] == ["AIH9", "AIH10", "AIH18"]


def test_empty_filter_returns_all(catalog):
    assert [h.id for h in catalog.query()] == [f"AIH{n}" for n in range(1, 25)]


def test_filter_by_stage_equals_query(catalog):
    for stage in LifecycleStage:
        assert catalog.filter_by_stage(stage) == catalog.query(stage=stage)


def test_conjunction_equals_intersection_of_single_axis_queries(catalog):
    for stage in (2, 3):
        for mode in HazardMode:
            for level in HazardLevel:
                combined = {h.id for h in catalog.query(stage=stage, mode=mode, level=level)}
                expected = (
                    {h.id for h in catalog.query(stage=stage)}
                    & {h.id for h in catalog.query(mode=mode)}
                    & {h.id for h in catalog.query(level=level)}
                )
                assert combined == expected


def test_results_ordered_by_numeric_id(catalog):
    ids = [h.id for h in catalog.query(stage=2)]
    assert ids == sorted(ids, key=lambda i: int(i[3:]))
    assert "AIH10" in ids and "AIH9" in ids
    assert ids.index("AIH9") < ids.index("AIH10")


def test_load_catalog_roundtrip(tmp_path, catalog):
    path = tmp_path / "cat.json"
    path.write_text(json.dumps(catalog.to_dict()), encoding="utf-8")
    again = load_catalog(path)
    assert again.to_dict() == catalog.to_dict()


def test_load_empty_hazard_list_fails():
    with pytest.raises(HazardManagementError) as err:
        load_catalog({"version": "1", "hazards": []})
    assert err.value.code == "catalog-invalid"
    assert "non-empty" in err.value.message


def test_load_duplicate_id_fails():
    doc = minimal_doc()
    doc["hazards"].append(dict(doc["hazards"][0], id="AIH7"))
    doc["hazards"].append(dict(doc["hazards"][0], id="AIH7"))
    with pytest.raises(HazardManagementError) as err:
        load_catalog(doc)
    assert err.value.code == "catalog-invalid"
    assert "AIH7" in err.value.message


def test_load_rejects_empty_stages():
    doc = minimal_doc()
    doc["hazards"][0]["stages"] = []
    with pytest.raises(HazardManagementError) as err:
        load_catalog(doc)
    assert any(f["rule"] == "stages-non-empty" for f in err.value.details["findings"])


def test_load_rejects_unknown_mode():
    doc = minimal_doc()
    doc["hazards"][0]["mode"] = "mystical"
    with pytest.raises(HazardManagementError) as err:
        load_catalog(doc)
    assert any(f["rule"] == "mode-known" for f in err.value.details["findings"])


def test_load_rejects_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(HazardManagementError) as err:
        load_catalog(path)
    assert err.value.code == "catalog-parse-error"


def test_unknown_stage_ordinal_rejected(catalog):
    with pytest.raises(HazardManagementError) as err:
        catalog.filter_by_stage(6)
    assert err.value.code == "unknown-stage"


def test_get_unknown_hazard(catalog):
    with pytest.raises(HazardManagementError) as err:
        catalog.get("AIH99")
    assert err.value.code == "unknown-hazard"
