use std::io::Write;

use kitwpa_core::analysis::load_spectrum;
use kitwpa_core::error::Error;
use kitwpa_core::spectrum::{Spectrum, SpectrumKind};
use num_complex::Complex64;
use proptest::prelude::*;

fn increasing_grid() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3..1e9f64, 1..60).prop_map(|steps| {
        let mut f = 0.0;
        steps
            .into_iter()
            .map(|s| {
                f += s;
                f
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn db_round_trip_is_bit_exact(
        grid in increasing_grid(),
        seed in prop::collection::vec(-1e300..1e300f64, 60),
        kind in prop::sample::select(vec![SpectrumKind::S21Db, SpectrumKind::GainDb, SpectrumKind::DsnrDb, SpectrumKind::NoiseDb]),
    ) {
        let values: Vec<f64> = seed[..grid.len()].iter().map(|v| v * 1e-298).collect();
        let s = Spectrum::db(grid, values, kind).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf, &["resolved: yes".into()]).unwrap();
        let back = Spectrum::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn complex_round_trip_is_bit_exact(
        grid in increasing_grid(),
        re in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 60),
        im in prop::collection::vec(-1.0..1.0f64, 60),
    ) {
        let n = grid.len();
        let values: Vec<Complex64> = re[..n].iter().zip(&im[..n]).map(|(r, i)| Complex64::new(*r, *i)).collect();
        let s = Spectrum::complex(grid, values).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf, &[]).unwrap();
        prop_assert_eq!(Spectrum::read_csv(buf.as_slice()).unwrap(), s);
    }
}

#[test]
fn load_from_disk() {
    let dir = std::env::temp_dir().join(format!("kitwpa-spectrum-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();

    let good = dir.join("good.csv");
    let s = Spectrum::db(
        vec![4e9, 5e9, 6e9],
        vec![1.0, 2.5, -0.125],
        SpectrumKind::DsnrDb,
    )
    .unwrap();
    s.write_csv(std::fs::File::create(&good).unwrap(), &[])
        .unwrap();
    assert_eq!(load_spectrum(&good).unwrap(), s);

    let empty = dir.join("empty.csv");
    std::fs::File::create(&empty).unwrap();
    assert!(load_spectrum(&empty).is_err());

    let nan = dir.join("nan.csv");
    let mut f = std::fs::File::create(&nan).unwrap();
    writeln!(f, "frequency_hz,value_db\n4e9,1\n5e9,NaN\n6e9,2").unwrap();
    match load_spectrum(&nan) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }

    let dup = dir.join("dup.csv");
    let mut f = std::fs::File::create(&dup).unwrap();
    writeln!(f, "frequency_hz,value_db\n4e9,1\n4e9,2").unwrap();
    assert!(matches!(
        load_spectrum(&dup),
        Err(Error::Parse { line: 3, .. })
    ));

    assert!(matches!(
        load_spectrum(dir.join("missing.csv")),
        Err(Error::Io { .. })
    ));
    std::fs::remove_dir_all(&dir).unwrap();
}
