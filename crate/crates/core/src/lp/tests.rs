use super::*;
use crate::model::evaluate;
use crate::oracle::brute_force_opt;
use alloc::vec;

fn opts() -> SolverOptions {
    SolverOptions::default()
}

#[test]
fn time_indexed_single_task() {
    let inst = Instance::new(vec![1.0], vec![1.0], vec![vec![1.0]]).unwrap();
    let model = build_time_indexed(&inst, 2).unwrap();
    let sol = solve(&model, &opts()).unwrap();
    assert!((sol.objective() - 3.0).abs() < 1e-7);
    let r = sol.task_rectangles(0);
    assert_eq!(r.len(), 1);
    assert_eq!((r[0].worker, r[0].slot), (0, 0));
    assert!((r[0].value - 1.0).abs() < 1e-7);
}

#[test]
fn time_indexed_two_unit_jobs_fill_both_slots() {
    let inst = Instance::new(vec![1.0], vec![1.0, 1.0], vec![vec![1.0, 1.0]]).unwrap();
    let model = build_time_indexed(&inst, 2).unwrap();
    let sol = solve(&model, &opts()).unwrap();
    // (Φ + 0 + 1) + (Φ + 1 + 1) with Φ = 2.
    assert!((sol.objective() - 7.0).abs() < 1e-7);
    let mut mass = [0.0; 2];
    for r in sol.rectangles() {
        mass[r.slot] += r.value;
    }
    assert!((mass[0] - 1.0).abs() < 1e-7 && (mass[1] - 1.0).abs() < 1e-7);
}

#[test]
fn integral_point_costs_its_wct() {
    let inst = Instance::new(
        vec![1.0, 2.0],
        vec![2.0, 1.0, 3.0],
        vec![vec![2.0, 1.0, 3.0], vec![1.0, 2.0, 2.0]],
    )
    .unwrap();
    let s = Schedule::from_orders(3, vec![vec![2, 1], vec![0]]).unwrap();
    let model = build_time_indexed(&inst, 6).unwrap();
    let mut x = vec![0.0; model.num_vars()];
    let mut clock = [0.0, 0.0];
    for (i, seq) in s.order().iter().enumerate() {
        for &j in seq {
            let v = model
                .vars()
                .iter()
                .position(|k| *k == VarKey { worker: i, task: j, slot: clock[i] as usize })
                .unwrap();
            x[v] = 1.0;
            clock[i] += inst.p(i, j);
        }
    }
    assert_eq!(model.primal_residual(&x), 0.0);
    assert_eq!(model.objective_of(&x), evaluate(&inst, &s).unwrap().wct);
}

#[test]
fn time_indexed_horizon_too_short_is_infeasible() {
    let inst = Instance::new(vec![1.0], vec![1.0, 1.0], vec![vec![2.0, 2.0]]).unwrap();
    let model = build_time_indexed(&inst, 3).unwrap();
    assert!(matches!(solve(&model, &opts()), Err(Error::Infeasible)));
    let model = build_time_indexed(&inst, 1).unwrap();
    assert!(matches!(solve(&model, &opts()), Err(Error::Infeasible)));
}

#[test]
fn interval_points_for_large_total() {
    assert_eq!(interval_count(30000.0, 3.0), 8);
    let t = interval_points(30000.0, 3.0);
    let mut expect = vec![0.0, 1.0];
    for k in 1..=8 {
        expect.push(libm::pow(4.0, k as f64));
    }
    assert_eq!(t, expect);
}

#[test]
fn interval_points_small_totals() {
    assert_eq!(interval_count(1.0, 3.0), 0);
    assert_eq!(interval_count(0.5, 3.0), 0);
    assert_eq!(interval_points(1.0, 3.0), vec![0.0, 1.0]);
    assert_eq!(interval_count(16.0, 3.0), 2);
    // Last interval (4, 16] holds 12 < 16, so one more interval is appended.
    assert_eq!(interval_points(16.0, 3.0), vec![0.0, 1.0, 4.0, 16.0, 64.0]);
}

#[test]
fn interval_single_task_bound() {
    let inst = Instance::new(vec![1.0], vec![1.0], vec![vec![1.0]]).unwrap();
    assert!((lower_bound(&inst, 3.0).unwrap() - 3.0).abs() < 1e-7);
}

#[test]
fn empty_model() {
    let inst = Instance::new(vec![1.0, 2.0], vec![], vec![vec![], vec![]]).unwrap();
    let model = build_interval_indexed(&inst, 3.0).unwrap();
    assert_eq!(model.num_vars(), 0);
    let sol = solve(&model, &opts()).unwrap();
    assert_eq!(sol.objective(), 0.0);
    assert!(sol.rectangles().is_empty());
    assert!(matches!(lower_bound(&inst, 3.0), Err(Error::InvalidArgument(_))));
}

fn sample() -> Instance {
    Instance::new(
        vec![1.5, 3.0, 0.5],
        vec![4.0, 1.0, 7.0, 2.0, 3.0],
        vec![
            vec![3.0, 1.0, 6.0, 2.5, 4.0],
            vec![1.0, 2.0, 8.0, 1.0, 2.0],
            vec![5.0, 4.0, 3.0, 2.0, 6.0],
        ],
    )
    .unwrap()
}

#[test]
fn solution_is_certified() {
    let inst = sample();
    for form in [IntervalForm::Standard, IntervalForm::Completion] {
        let model = build_interval_indexed_with(&inst, 3.0, form, &inst.contact_loads()).unwrap();
        let sol = solve(&model, &opts()).unwrap();
        let cert = sol.certificate().unwrap();
        assert!(cert.within(1e-7), "{cert:?}");
        assert!(sol.assignment_residual() < 1e-7);
        for j in 0..inst.n() {
            let s: f64 = (0..inst.m()).map(|i| sol.y(i, j)).sum();
            assert!((s - 1.0).abs() < 1e-7);
        }
    }
    let model = build_time_indexed(&inst, 20).unwrap();
    let sol = solve(&model, &opts()).unwrap();
    assert!(sol.certificate().unwrap().within(1e-7));
}

#[test]
fn weight_scaling_scales_optimum() {
    let inst = sample();
    let base = lower_bound(&inst, 3.0).unwrap();
    let scaled = Instance::new(
        inst.workers().iter().map(|w| w.phi).collect(),
        inst.tasks().iter().map(|t| t.weight * 7.5).collect(),
        (0..inst.m()).map(|i| inst.rst_row(i).to_vec()).collect(),
    )
    .unwrap();
    let big = lower_bound(&scaled, 3.0).unwrap();
    assert!((big - 7.5 * base).abs() <= 1e-9 * big);
}

#[test]
fn completion_form_bounds_opt() {
    let inst = sample();
    let (_, opt) = brute_force_opt(&inst, false).unwrap();
    let lb = lower_bound_with(&inst, 3.0, IntervalForm::Completion, &opts()).unwrap();
    assert!(lb <= opt + 1e-6, "{lb} > {opt}");
}

#[test]
fn forbidden_variables_excluded() {
    let inst = Instance::new(vec![1.0], vec![1.0, 1.0], vec![vec![3.0, 1.0]]).unwrap();
    // Total 4: points 0, 1, 4, 16; p = 3 cannot end by t_1 = 1.
    let model = build_interval_indexed(&inst, 3.0).unwrap();
    assert_eq!(model.slot_starts(), &[0.0, 1.0, 4.0]);
    assert_eq!(model.forbidden_count(), 1);
    assert!(!model.vars().iter().any(|k| k.task == 0 && k.slot == 0));
}

#[test]
fn export_parse_round_trip() {
    let inst = sample();
    let model = build_interval_indexed(&inst, 3.0).unwrap();
    let text = export_model(&model);
    let parsed = parse_model(&text).unwrap();
    assert_eq!(parsed.vars.len(), model.num_vars());
    assert_eq!(parsed.rows.len(), model.num_rows());
    assert_eq!(parsed.objective, model.cost());
    for (r, row) in parsed.rows.iter().enumerate() {
        assert_eq!(row.rhs, model.rhs()[r]);
        assert_eq!(row.sense, model.sense()[r]);
    }
    assert_eq!(export_model(&model), text);
}

#[test]
fn export_empty_model() {
    let inst = Instance::new(vec![1.0], vec![], vec![vec![]]).unwrap();
    let text = export_model(&build_interval_indexed(&inst, 3.0).unwrap());
    let parsed = parse_model(&text).unwrap();
    assert!(parsed.vars.is_empty() && parsed.rows.is_empty());
}

#[test]
fn parse_errors_carry_line_numbers() {
    let err = parse_model("Minimize\n obj: 1 x\nSubject To\n c1: 1 x <= abc\nEnd\n").unwrap_err();
    assert!(alloc::format!("{err}").contains("line 4"), "{err}");
    assert!(parse_model("Minimize\n obj: x\n").is_err());
}

#[test]
fn from_schedule_objective_is_wct() {
    let inst = sample();
    let (s, opt) = brute_force_opt(&inst, false).unwrap();
    let sol = FractionalSolution::from_schedule(&inst, &s).unwrap();
    assert_eq!(sol.objective(), opt);
    for j in 0..inst.n() {
        assert_eq!(sol.y(s.worker_of(j), j), 1.0);
    }
}
