use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use itertools::Itertools;

use braidcomplex::cube::build_uconf_with;
use braidcomplex::par;
use braidcomplex::subcomplex::induced_in;
use braidcomplex::{make_theta, BuildOptions, Exec};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn build(c: &mut Criterion) {
    let g = make_theta(10).unwrap();
    let mut group = c.benchmark_group("build_theta10_n3");
    for (name, exec) in MODES {
        let opts = BuildOptions { exec, ..Default::default() };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| build_uconf_with(black_box(&g), 3, &opts).unwrap())
        });
    }
    group.finish();
}

fn links(c: &mut Criterion) {
    let x = build_uconf_with(&make_theta(10).unwrap(), 3, &BuildOptions::default()).unwrap();
    let mut group = c.benchmark_group("check_links_theta10_n3");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| x.check_links(exec).unwrap()));
    }
    group.finish();
}

fn fullness(c: &mut Criterion) {
    let x = Arc::new(build_uconf_with(&make_theta(7).unwrap(), 3, &BuildOptions::default()).unwrap());
    let subsets: Vec<Vec<String>> = (1..=7)
        .combinations(4)
        .map(|s| ["a".to_string(), "b".to_string()].into_iter().chain(s.iter().map(usize::to_string)).collect())
        .collect();
    let mut group = c.benchmark_group("fullness_sweep_theta7");
    group.sample_size(20);
    for (name, exec) in MODES {
        let opts = BuildOptions { exec: Exec::Sequential, ..Default::default() };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                par::map(exec, &subsets, |s| {
                    let labels: Vec<&str> = s.iter().map(String::as_str).collect();
                    let inc = induced_in(&x, &labels, &opts).unwrap();
                    inc.check_full_links(Exec::Sequential).unwrap().full
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, build, links, fullness);
criterion_main!(benches);
