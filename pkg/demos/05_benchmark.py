# Desk-scale benchmark run: time the matchers across workload sizes and
# overlap degrees, then write the CSV the bench CLI would produce.
#
# The same sweep is available from the command line, e.g.
#   ddmatch bench --algo itm --extents 100000 --alpha 1 --reps 30 --csv out.csv

from ddmatch import WorkloadSpec, run_bench, write_csv
from ddmatch.bench import attach_speedups

results = []

# Sequential comparison: brute force is O(n*m) regardless of output size;
# sort-based and interval-tree matching exploit structure and win big as
# N grows.
for extents in (20_000, 50_000):
    for algo in ("bf", "sbm", "itm"):
        r = run_bench(WorkloadSpec(extents, alpha=1.0, seed=3), algo, reps=3)
        results.append(r)
        print(f"{algo:4s} N={extents:6d} alpha=1    mean {r.mean_s * 1000:8.1f}ms  K={r.matches}")

# Interval-tree matching is output-sensitive: its time grows with the
# number of matches, which alpha controls.
for alpha in (0.01, 1.0, 100.0):
    r = run_bench(WorkloadSpec(50_000, alpha=alpha, seed=3), "itm", reps=3)
    results.append(r)
    print(f"itm  N= 50000 alpha={alpha:<6g} mean {r.mean_s * 1000:8.1f}ms  K={r.matches}")

# Parallel interval-tree matching; the speedup column compares each row
# against its p=1 baseline.
for workers in (1, 2):
    r = run_bench(WorkloadSpec(50_000, alpha=100.0, seed=3), "itm-par", threads=workers, reps=3)
    results.append(r)
    print(f"itm-par p={workers} N= 50000 alpha=100  mean {r.mean_s * 1000:8.1f}ms")

attach_speedups(results)
write_csv(results, "bench_results.csv")
print("\nwrote bench_results.csv")
