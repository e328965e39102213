use bendseg::raster::{decode, encode, Decoded, GridKind, Grid};
use proptest::prelude::*;

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..24, 1usize..24)
}

fn binary() -> impl Strategy<Value = Decoded> {
    dims().prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<bool>(), w * h).prop_map(move |c| Decoded::Binary(Grid::new(w, h, c).unwrap()))
    })
}

fn labels() -> impl Strategy<Value = Decoded> {
    (dims(), prop_oneof![Just(255u32), Just(65535u32)]).prop_flat_map(|((w, h), max)| {
        prop::collection::vec(0..=max, w * h).prop_map(move |c| Decoded::Labels(Grid::new(w, h, c).unwrap()))
    })
}

fn scalars() -> impl Strategy<Value = Decoded> {
    dims().prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<f32>().prop_filter("finite", |v| v.is_finite()), w * h)
            .prop_map(move |c| Decoded::Scalar(Grid::new(w, h, c.into_iter().map(f64::from).collect()).unwrap()))
    })
}

fn kind(d: &Decoded) -> GridKind {
    match d {
        Decoded::Binary(_) => GridKind::PgmBinary,
        Decoded::Labels(_) => GridKind::PgmLabel,
        Decoded::Scalar(_) => GridKind::Sf32,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn every_kind_round_trips(grid in prop_oneof![binary(), labels(), scalars()]) {
        let bytes = encode(&grid).unwrap();
        let back = decode(&bytes, kind(&grid)).unwrap();
        prop_assert_eq!(&back, &grid);
        prop_assert_eq!(encode(&back).unwrap(), bytes);
    }
}
