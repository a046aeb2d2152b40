use std::path::Path;

use twogroups_core::catalog::{discover_entry, entry_path, load_entry, verify_entry, DEFAULT_BUDGET, SPORADIC};

fn data_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/catalog"))
}

#[test]
fn shipped_entries_verify() {
    for t in &SPORADIC {
        let e = load_entry(&entry_path(data_dir(), t)).unwrap();
        assert_eq!(e.name, t.name);
        assert_eq!(e.n, t.n);
        let r = verify_entry(&e).unwrap();
        assert!(r.verified, "{r:?}");
        assert_eq!(r.order, t.order);
        assert_eq!(r.perfect, t.perfect);
    }
}

#[test]
fn shipped_entries_regenerate_from_seeds() {
    for t in &SPORADIC {
        let shipped = load_entry(&entry_path(data_dir(), t)).unwrap();
        assert_eq!(shipped.seed, Some(t.seed));
        let fresh = discover_entry(t, t.seed, DEFAULT_BUDGET).unwrap();
        assert_eq!(fresh, shipped, "{}", t.name);
    }
}

#[test]
fn independent_orders() {
    // |A₇| = 7!/2, |G₂(2)| = 2·|PSU₃(3)| = 2·3³·(3³+1)·(3²−1).
    let fact = |n: u128| (1..=n).product::<u128>();
    let expect = [fact(6) / 2, fact(6), fact(7) / 2, 27 * 28 * 8, 2 * 27 * 28 * 8];
    for (t, o) in SPORADIC.iter().zip(expect) {
        assert_eq!(t.order, o, "{}", t.name);
    }
}
