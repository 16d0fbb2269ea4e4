import json

import numpy as np
import pytest

from mta import (
    ClassEmbeddings,
    EmbeddingSet,
    FormatError,
    SizeMismatch,
    NonFinite,
    read_bundle,
    write_bundle,
)
from mta.bundle import HEADER_NAME, VIEWS_NAME, is_bundle

from helpers import make_classes, make_views


def small_bundle(tmp_path, rng, n=1, d=4, k=2, sets=1, name="b"):
    views = make_views(rng, n, d)
    class_sets = [make_classes(rng, k, d) for _ in range(sets)]
    return write_bundle(views, class_sets, tmp_path / name), views, class_sets


class TestRoundTrip:
    def test_minimal_bundle_roundtrip_exact_at_f32(self, tmp_path, rng):
        root, views, class_sets = small_bundle(tmp_path, rng)
        loaded_views, loaded_sets, header = read_bundle(root)
        np.testing.assert_array_equal(
            loaded_views.views.astype(np.float32), views.views.astype(np.float32)
        )
        assert len(loaded_sets) == 1
        np.testing.assert_array_equal(
            loaded_sets[0].classes.astype(np.float32),
            class_sets[0].classes.astype(np.float32),
        )
        assert header["n_views"] == 1 and header["dim"] == 4

    def test_multiple_class_sets(self, tmp_path, rng):
        root, _, _ = small_bundle(tmp_path, rng, n=3, d=6, k=4, sets=5)
        _, loaded_sets, header = read_bundle(root)
        assert len(loaded_sets) == 5
        assert header["class_sets"] == 5

    def test_write_is_deterministic(self, tmp_path, rng):
        views = make_views(rng, 4, 8)
        class_sets = [make_classes(rng, 3, 8)]
        a = write_bundle(views, class_sets, tmp_path / "a")
        b = write_bundle(views, class_sets, tmp_path / "b")
        for name in [HEADER_NAME, VIEWS_NAME, "classes_00.f32"]:
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_metadata_preserved(self, tmp_path, rng):
        views = make_views(rng, 2, 4)
        root = write_bundle(views, [make_classes(rng, 2, 4)], tmp_path / "m",
                            metadata={"source": "unit-test"})
        _, _, header = read_bundle(root)
        assert header["meta"]["source"] == "unit-test"

    def test_is_bundle(self, tmp_path, rng):
        root, _, _ = small_bundle(tmp_path, rng)
        assert is_bundle(root)
        assert not is_bundle(tmp_path / "nope")


class TestValidation:
    def test_truncated_views_file(self, tmp_path, rng):
        root, _, _ = small_bundle(tmp_path, rng, n=3, d=4)
        raw = (root / VIEWS_NAME).read_bytes()
        (root / VIEWS_NAME).write_bytes(raw[:-4])
        with pytest.raises(SizeMismatch, match="48 bytes"):
            read_bundle(root)

    def test_missing_class_file(self, tmp_path, rng):
        root, _, _ = small_bundle(tmp_path, rng)
        (root / "classes_00.f32").unlink()
        with pytest.raises(SizeMismatch):
            read_bundle(root)

    def test_future_version_advises_upgrade(self, tmp_path, rng):
        root, _, _ = small_bundle(tmp_path, rng)
        header = json.loads((root / HEADER_NAME).read_text())
        header["version"] = 99
        (root / HEADER_NAME).write_text(json.dumps(header))
        with pytest.raises(FormatError, match="upgrade"):
            read_bundle(root)

    def test_bad_magic(self, tmp_path, rng):
        root, _, _ = small_bundle(tmp_path, rng)
        header = json.loads((root / HEADER_NAME).read_text())
        header["format"] = "parquet"
        (root / HEADER_NAME).write_text(json.dumps(header))
        with pytest.raises(FormatError, match="magic"):
            read_bundle(root)

    def test_invalid_json_header(self, tmp_path, rng):
        root, _, _ = small_bundle(tmp_path, rng)
        (root / HEADER_NAME).write_text("{not json")
        with pytest.raises(FormatError):
            read_bundle(root)

    def test_missing_header(self, tmp_path):
        (tmp_path / "empty").mkdir()
        with pytest.raises(FormatError):
            read_bundle(tmp_path / "empty")

    def test_non_finite_rejected(self, tmp_path, rng):
        root, _, _ = small_bundle(tmp_path, rng, n=2, d=4)
        bad = np.full((2, 4), np.nan, dtype="<f4")
        (root / VIEWS_NAME).write_bytes(bad.tobytes())
        with pytest.raises(NonFinite):
            read_bundle(root)

    def test_rejects_empty_class_sets_on_write(self, tmp_path, rng):
        with pytest.raises(ValueError):
            write_bundle(make_views(rng, 2, 4), [], tmp_path / "x")

    def test_rejects_zero_views(self):
        with pytest.raises(ValueError):
            EmbeddingSet(np.empty((0, 4)))

    def test_loader_renormalizes_rows(self, tmp_path, rng):
        root, _, _ = small_bundle(tmp_path, rng, n=2, d=4)
        skewed = (1.7 * np.eye(4)[:2]).astype("<f4")
        (root / VIEWS_NAME).write_bytes(skewed.tobytes())
        views, _, _ = read_bundle(root)
        np.testing.assert_allclose(np.linalg.norm(views.views, axis=1), 1.0, atol=1e-9)
