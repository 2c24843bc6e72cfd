use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use tensorop::binodal::{tuple_universe, verify_table};
use tensorop::interchange::{grothendieck_poset, l_images};
use tensorop::par;
use tensorop::t_construction::{check_axial_round_trip_exhaustive, Trees, WordOperad, CHECK_LABEL_ARITY};
use tensorop::tensor_calculus::bounded_tensor_classes;
use tensorop::verify::{corpus, DEFAULT_SEED};

fn modes() -> Vec<(&'static str, bool)> {
    if cfg!(feature = "parallel") {
        vec![("parallel", false), ("sequential", true)]
    } else {
        vec![("sequential", true)]
    }
}

fn compare(c: &mut Criterion) {
    let op = WordOperad { k: 2 };
    let tr = Trees::new(&op);
    let tuples = tuple_universe(&tr, 3, 3, 2, 4).unwrap();
    let (a, b) = corpus(DEFAULT_SEED, 1).pop().unwrap();

    let mut group = c.benchmark_group("core");
    group.sample_size(10);
    for (name, sequential) in modes() {
        par::set_sequential(sequential);
        group.bench_function(BenchmarkId::new("grothendieck_1_1_3", name), |bch| {
            bch.iter(|| {
                let g = grothendieck_poset(1, 1, 3).unwrap();
                l_images(&g).unwrap().len()
            })
        });
        group.bench_function(BenchmarkId::new("intersection_table", name), |bch| {
            bch.iter(|| verify_table(&tr, &tuples).unwrap().len())
        });
        group.bench_function(BenchmarkId::new("axial_round_trip_binary_5", name), |bch| {
            bch.iter(|| check_axial_round_trip_exhaustive(&tr, 2, 5, CHECK_LABEL_ARITY).unwrap())
        });
        group.bench_function(BenchmarkId::new("tensor_classes_binary", name), |bch| {
            bch.iter(|| bounded_tensor_classes(&a, &b, 2, 6).unwrap().count())
        });
    }
    par::set_sequential(false);
    group.finish();
}

criterion_group!(benches, compare);
criterion_main!(benches);
