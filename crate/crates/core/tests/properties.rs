use proptest::prelude::*;
use w1lab_core::front::evolve;
use w1lab_core::shock::rational_approximation;
use w1lab_core::solver::step_monotone;
use w1lab_core::study::{parse_csv, render, run_study};
use w1lab_core::{
    project, w1, w1_discrete, ConvexFlux, Grid, GridFunction, NumericalFlux, Order, OutputFormat,
    RunConfig, Scheme, SchemeConfig, StepFunction,
};

fn decreasing_step() -> impl Strategy<Value = StepFunction> {
    (1usize..5)
        .prop_flat_map(|k| {
            (
                prop::collection::vec(0.05f64..0.95, k),
                prop::collection::vec(-1.5f64..2.0, k + 1),
            )
        })
        .prop_filter_map("distinct breakpoints", |(mut xs, mut vs)| {
            xs.sort_by(f64::total_cmp);
            vs.sort_by(|a, b| b.total_cmp(a));
            if xs.windows(2).any(|w| w[1] - w[0] < 1e-3)
                || vs.windows(2).any(|w| w[0] - w[1] < 1e-3)
            {
                return None;
            }
            StepFunction::new(xs, vs).ok()
        })
}

fn zero_mass_grid_pair() -> impl Strategy<Value = (GridFunction, GridFunction)> {
    (2usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(-1.0f64..1.0, n),
            prop::collection::vec(-1.0f64..1.0, n),
        )
            .prop_map(move |(u, mut v)| {
                let g = Grid::over(0.0, 1.0, n).unwrap();
                let shift = (u.iter().sum::<f64>() - v.iter().sum::<f64>()) / n as f64;
                v.iter_mut().for_each(|x| *x += shift);
                (
                    GridFunction::new(g, u, 0.0, 0.0).unwrap(),
                    GridFunction::new(g, v, 0.0, 0.0).unwrap(),
                )
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn w1_is_symmetric_and_bounded_by_w1d((u, v) in zero_mass_grid_pair()) {
        let a = w1(&u, &v).unwrap();
        let b = w1(&v, &u).unwrap();
        prop_assert!((a - b).abs() <= 1e-15);
        prop_assert!(a <= w1_discrete(&u, &v).unwrap() + 1e-15);
        prop_assert!(a >= 0.0);
    }

    #[test]
    fn w1_triangle_inequality(
        (u, v) in zero_mass_grid_pair(),
        seed in prop::collection::vec(-1.0f64..1.0, 40),
    ) {
        let n = u.values().len();
        let mean_u = u.values().iter().sum::<f64>() / n as f64;
        let mut w: Vec<f64> = seed[..n].to_vec();
        let shift = mean_u - w.iter().sum::<f64>() / n as f64;
        w.iter_mut().for_each(|x| *x += shift);
        let w = GridFunction::new(*u.grid(), w, 0.0, 0.0).unwrap();
        let uv = w1(&u, &v).unwrap();
        let uw = w1(&u, &w).unwrap();
        let wv = w1(&w, &v).unwrap();
        prop_assert!(uv <= uw + wv + 1e-14);
    }

    #[test]
    fn projection_preserves_mass_and_respects_bound(u in decreasing_step(), n in 3usize..300) {
        let g = Grid::over(0.0, 1.0, n).unwrap();
        let p = project(&u, &g).unwrap();
        prop_assert!((p.mass() - u.integral(0.0, 1.0)).abs() <= 1e-13);
        prop_assert!(w1(&u, &p).unwrap() <= u.tv() * g.dx() * g.dx() + 1e-16);
    }

    #[test]
    fn front_tracking_conserves_mass(u in decreasing_step(), t in 0.0f64..0.8) {
        let f = ConvexFlux::burgers();
        let ut = evolve(&u, &f, t).unwrap();
        let (a, b) = (-3.0, 4.0);
        let inflow = t * (f.eval(u.left_state()) - f.eval(u.right_state()));
        let defect = ut.integral(a, b) - u.integral(a, b) - inflow;
        prop_assert!(defect.abs() <= 1e-12, "defect {}", defect);
        prop_assert!(ut.is_decreasing() || ut.num_jumps() == 0);
        prop_assert!((ut.tv() - u.tv()).abs() <= 1e-12);
    }

    #[test]
    fn monotone_step_keeps_order_and_tv(u in decreasing_step(), s in 0.0f64..0.05, cfl in 0.1f64..0.9) {
        let v = u.translate(-s);
        let g = Grid::over(-0.5, 1.5, 120).unwrap();
        let (pu, pv) = (project(&u, &g).unwrap(), project(&v, &g).unwrap());
        for scheme in Scheme::ALL {
            let nf = NumericalFlux::new(scheme, ConvexFlux::burgers());
            let (lo, hi) = (u.min_value(), u.max_value());
            let dt = w1lab_core::flux::cfl_timestep(&nf, &g, lo, hi, cfl).unwrap();
            let cfg = SchemeConfig::new(nf.with_lambda(dt / g.dx()), Order::Monotone1, cfl);
            let un = step_monotone(&pu, &cfg, dt).unwrap();
            let vn = step_monotone(&pv, &cfg, dt).unwrap();
            for (a, b) in un.values().iter().zip(vn.values()) {
                prop_assert!(a + 1e-14 >= *b);
            }
            prop_assert!(un.tv() <= pu.tv() + 1e-13);
        }
    }

    #[test]
    fn rational_approximation_recovers_small_fractions(p in -50i64..50, q in 1u64..200) {
        let x = p as f64 / q as f64;
        let (pp, qq) = rational_approximation(x, 4096, 1e-12).unwrap();
        prop_assert!((pp as f64 / qq as f64 - x).abs() <= 1e-12);
        prop_assert!(qq <= q);
    }
}

#[test]
fn studies_are_deterministic() {
    let cfg = RunConfig {
        cells: vec![32, 64, 128],
        ..RunConfig::default()
    };
    let a = render(&run_study(&cfg).unwrap(), OutputFormat::Csv).unwrap();
    let b = render(&run_study(&cfg).unwrap(), OutputFormat::Csv).unwrap();
    assert_eq!(a, b);
    let table = parse_csv(&a).unwrap();
    assert_eq!(table.rows.len(), 3);
    for pair in table.rows.windows(2) {
        let expected = (pair[0].w1 / pair[1].w1).log2();
        assert!((pair[1].w1_ooc.unwrap() - expected).abs() < 5e-3);
    }
}

#[test]
fn every_scheme_and_order_converges() {
    for scheme in Scheme::ALL {
        for order in [Order::Monotone1, Order::Eno2, Order::Eno3] {
            let cfg = RunConfig {
                scheme,
                order,
                cells: vec![256, 512],
                ..RunConfig::default()
            };
            let t = run_study(&cfg).unwrap();
            assert!(t.rows[1].w1 < t.rows[0].w1, "{scheme} {order}");
            assert!(t.rows[1].l1 < t.rows[0].l1, "{scheme} {order}");
        }
    }
}
