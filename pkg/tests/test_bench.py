import pytest

from combbmm.bench import CSV_HEADER, SUITES, BenchRow, format_csv, run_bench, timing_ratios


def strip_timing(rows):
    return [(r.engine, r.n, r.density, r.seed, r.triangles, r.pieces) for r in rows]


@pytest.mark.parametrize("suite", ["listing", "bmm"])
def test_engines_report_same_counts(suite):
    rows = run_bench(suite, [6, 10], [1, 2], density="1/2", reps=3)
    assert len(rows) == len(SUITES[suite]) * 4
    by = {}
    for r in rows:
        by.setdefault((r.n, r.seed), set()).add(r.triangles)
    assert all(len(v) == 1 for v in by.values())


def test_threesum_rows():
    rows = run_bench("threesum", [8, 16], [1, 2, 3], density="0", reps=3)
    assert {r.engine for r in rows} == {"naive", "triangle"}
    assert all(r.triangles == 0 for r in rows if r.engine == "naive")
    assert all(r.density == "0/1" for r in rows)


def test_csv_shape_and_determinism():
    a = run_bench("listing", [8], [3], reps=3)
    b = run_bench("listing", [8], [3], reps=3)
    assert strip_timing(a) == strip_timing(b)
    text = format_csv(a)
    lines = text.splitlines()
    assert lines[0] == CSV_HEADER == "engine,n,density,seed,wall_ns,triangles,pieces"
    assert all(len(line.split(",")) == 7 for line in lines)


def test_parallel_matches_serial():
    a = run_bench("listing", [6, 8], [1, 2], reps=3, jobs=2)
    b = run_bench("listing", [6, 8], [1, 2], reps=3, jobs=1)
    assert strip_timing(a) == strip_timing(b)


def test_ratios_and_validation():
    rows = [BenchRow("naive", 8, "1/2", 1, 100, 5, 0), BenchRow("fast", 8, "1/2", 1, 50, 5, 0),
            BenchRow("naive", 8, "1/2", 2, 300, 5, 0), BenchRow("fast", 8, "1/2", 2, 100, 5, 0)]
    assert timing_ratios(rows, "naive", "fast") == {8: 2.5}
    with pytest.raises(ValueError):
        run_bench("listing", [4], [1], reps=2)
    with pytest.raises(ValueError):
        run_bench("nope", [4], [1])
