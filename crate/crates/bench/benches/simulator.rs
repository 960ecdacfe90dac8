use std::hint::black_box;

use chainsdn::{allocate_link, World};
use chainsdn_bench::{case_b, ledger_with_blocks, mixed_demands, ten_mbps_link};
use criterion::{criterion_group, criterion_main, Criterion};

fn link_allocation(c: &mut Criterion) {
    let link = ten_mbps_link();
    for n in [4, 64] {
        let demands = mixed_demands(n);
        c.bench_function(&format!("allocate_link/{n}"), |b| {
            b.iter(|| allocate_link(&link, black_box(&demands)))
        });
    }
}

fn ledger(c: &mut Criterion) {
    c.bench_function("ledger/append_1000", |b| b.iter(|| ledger_with_blocks(black_box(1000))));
    let chain = ledger_with_blocks(1000);
    c.bench_function("ledger/validate_1000", |b| {
        b.iter(|| black_box(&chain).validate_chain())
    });
}

fn simulation(c: &mut Criterion) {
    let scenario = case_b();
    c.bench_function("case_b/400_ticks", |b| {
        b.iter(|| {
            let mut world = World::new(black_box(&scenario)).unwrap();
            world.run_to_end().unwrap();
            world.rows().len()
        })
    });
}

criterion_group!(benches, link_allocation, ledger, simulation);
criterion_main!(benches);
