use chainsdn::allocate_link;
use chainsdn_bench::{case_b, ledger_with_blocks, mixed_demands, ten_mbps_link};

#[test]
fn fixtures_are_well_formed() {
    assert_eq!(case_b().ticks, 400);
    let chain = ledger_with_blocks(50);
    assert_eq!(chain.len(), 50);
    assert!(chain.validate_chain());
    let link = ten_mbps_link();
    let total: f64 = allocate_link(&link, &mixed_demands(64)).iter().sum();
    assert!((total - 10e6).abs() < 1.0);
}
