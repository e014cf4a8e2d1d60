use trihist::bench::{
    convergence_sweep, failure_fraction, run_record, write_csv, ConvergenceConfig, ConvergenceRecord, MeshFamily,
    Mode, RunSpec, TestFunction,
};
use trihist::selection::Method;

fn small_config(family: MeshFamily) -> ConvergenceConfig {
    ConvergenceConfig {
        family,
        ns: vec![6, 12],
        seed: 7,
        methods: Method::ALL.to_vec(),
        functions: vec![TestFunction::F1, TestFunction::F3],
        modes: vec![Mode::Histopolation, Mode::Regression],
        grid_resolution: 41,
        lebesgue: false,
        norm_bound: false,
    }
}

#[test]
fn csv_rows_are_rederivable() {
    let records = convergence_sweep(&small_config(MeshFamily::RandomAxes));
    assert_eq!(records.len(), 2 * 3 * 2 * 2);

    let mut buf = Vec::new();
    write_csv(&records, &mut buf).unwrap();
    let mut reader = csv::Reader::from_reader(buf.as_slice());
    let parsed: Vec<ConvergenceRecord> = reader.deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(parsed.len(), records.len());

    for row in &parsed {
        let spec = RunSpec {
            family: row.mesh,
            n: row.n,
            seed: row.seed,
            m: row.m,
            d: match row.mode {
                Mode::Histopolation => None,
                Mode::Regression => Some(row.d),
            },
            method: row.method,
            function: row.function,
            grid_resolution: 41,
            lebesgue: false,
            norm_bound: false,
        };
        let again = run_record(&spec);
        assert_eq!(again.status, row.status);
        if row.status == "ok" {
            let tol = 1e-12 * row.sup_error.abs().max(1.0);
            assert!(
                (again.sup_error - row.sup_error).abs() <= tol,
                "{:?}: {} vs {}",
                spec.method,
                again.sup_error,
                row.sup_error
            );
        } else {
            assert!(row.sup_error.is_nan());
        }
    }
}

#[test]
fn fk_sweep_has_no_failures() {
    let records = convergence_sweep(&small_config(MeshFamily::FriedrichsKeller));
    assert_eq!(failure_fraction(&records), 0.0);
    assert!(records.iter().all(|r| r.status == "ok"), "{records:?}");
}
