import numpy as np
import pytest

from mixselect.dataio import (
    DataError,
    Dataset,
    VariableSet,
    read_csv,
    subsample_rows,
    subset_columns,
    variable_set,
    write_csv,
)


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestReadCsv:
    def test_basic_with_header(self, tmp_path):
        data = read_csv(write(tmp_path, "a,b\n1,2\n3,4\n5,6\n"))
        assert (data.n, data.d) == (3, 2)
        assert data.col_names == ("a", "b")
        assert data.values[2, 1] == 6.0

    def test_headerless_generates_names(self, tmp_path):
        data = read_csv(write(tmp_path, "1,2\n3,4\n"), header=False)
        assert data.col_names == ("X1", "X2")
        assert data.n == 2

    def test_missing_cell_reports_location(self, tmp_path):
        with pytest.raises(DataError, match=r"row 2, column 2"):
            read_csv(write(tmp_path, "a,b\n1,2\n3,NA\n"))

    def test_categorical_cell_is_hard_error(self, tmp_path):
        with pytest.raises(DataError, match="[Cc]ategorical"):
            read_csv(write(tmp_path, "a,b\n1,red\n"))

    def test_ragged_row(self, tmp_path):
        with pytest.raises(DataError, match="row 2"):
            read_csv(write(tmp_path, "a,b\n1,2\n3\n"))

    def test_infinity_rejected(self, tmp_path):
        with pytest.raises(DataError, match="non-finite"):
            read_csv(write(tmp_path, "a\n1\ninf\n"))

    def test_header_sniffing(self, tmp_path):
        assert read_csv(write(tmp_path, "x,y\n1,2\n")).col_names == ("x", "y")
        assert read_csv(write(tmp_path, "1,2\n3,4\n")).col_names == ("X1", "X2")


class TestRoundTrip:
    def test_write_read_identity(self, tmp_path):
        rng = np.random.default_rng(5)
        data = Dataset.from_array(rng.normal(size=(17, 4)) * 1e3,
                                  ("w", "x", "y", "z"))
        path = tmp_path / "rt.csv"
        write_csv(data, path)
        back = read_csv(path)
        assert back.col_names == data.col_names
        assert np.allclose(back.values, data.values, rtol=1e-12, atol=0)


class TestDataset:
    def test_rejects_nan(self):
        with pytest.raises(DataError):
            Dataset.from_array([[1.0, np.nan]])

    def test_rejects_duplicate_names(self):
        with pytest.raises(DataError):
            Dataset(np.ones((2, 2)), ("a", "a"))

    def test_values_read_only(self):
        data = Dataset.from_array([[1.0, 2.0]])
        with pytest.raises(ValueError):
            data.values[0, 0] = 3.0


class TestSubsetColumns:
    def test_projection_order(self):
        data = Dataset.from_array(np.arange(15.0).reshape(3, 5))
        sub = subset_columns(data, variable_set([4, 1], 5))
        assert sub.col_names == ("X5", "X2")
        assert np.array_equal(sub.values, data.values[:, [4, 1]])

    def test_identity(self):
        data = Dataset.from_array(np.arange(6.0).reshape(2, 3))
        sub = subset_columns(data, variable_set([0, 1, 2], 3))
        assert np.array_equal(sub.values, data.values)

    def test_empty_selection_rejected(self):
        data = Dataset.from_array(np.ones((2, 2)))
        with pytest.raises(DataError):
            subset_columns(data, VariableSet(()))

    def test_out_of_range(self):
        data = Dataset.from_array(np.ones((2, 2)))
        with pytest.raises(DataError):
            subset_columns(data, VariableSet((3,)))


class TestVariableSet:
    def test_duplicates_rejected(self):
        with pytest.raises(DataError):
            VariableSet((1, 1))

    def test_order_preserved(self):
        assert variable_set([3, 0, 2], 5).indices == (3, 0, 2)


class TestSubsampleRows:
    def test_full_sample_is_everything(self):
        data = Dataset.from_array(np.random.default_rng(0).normal(size=(10, 2)))
        idx = subsample_rows(data, 10, seed=123)
        assert np.array_equal(idx, np.arange(10))

    def test_deterministic_for_seed(self):
        data = Dataset.from_array(np.zeros((1000, 1)) + np.arange(1000)[:, None])
        a = subsample_rows(data, 200, seed=1)
        b = subsample_rows(data, 200, seed=1)
        assert np.array_equal(a, b)

    def test_different_seeds_differ(self):
        data = Dataset.from_array(np.arange(1000.0)[:, None])
        a = subsample_rows(data, 200, seed=1)
        b = subsample_rows(data, 200, seed=2)
        assert not np.array_equal(a, b)

    def test_size_out_of_range(self):
        data = Dataset.from_array(np.ones((5, 1)))
        with pytest.raises(DataError):
            subsample_rows(data, 6)
        with pytest.raises(DataError):
            subsample_rows(data, 0)

    def test_bounds_and_uniqueness_randomized(self):
        rng = np.random.default_rng(99)
        pool = {n: Dataset.from_array(np.zeros((n, 1))) for n in
                rng.integers(1, 800, size=25)}
        for _ in range(1000):
            n = int(rng.choice(list(pool)))
            size = int(rng.integers(1, n + 1))
            seed = int(rng.integers(0, 2**32))
            idx = subsample_rows(pool[n], size, seed)
            assert idx.shape == (size,)
            assert np.all(np.diff(idx) > 0)  # sorted, distinct
            assert idx[0] >= 0 and idx[-1] < n
