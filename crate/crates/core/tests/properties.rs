use geniter::expr::{compile_ast, parse, BinOp, Expr, Func};
use geniter::{iterate, Complex64, MapSpec, Scheme};
use proptest::prelude::*;

fn leaf(arity: usize) -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0..arity).prop_map(Expr::Var),
        (0.0f64..100.0).prop_map(Expr::Const),
        (0u32..10).prop_map(|k| Expr::Const(k as f64)),
        Just(Expr::Pi),
        Just(Expr::Param("a".into())),
    ]
}

fn expr(arity: usize) -> impl Strategy<Value = Expr> {
    leaf(arity).prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (inner.clone(), inner.clone(), 0..5usize).prop_map(|(l, r, k)| {
                let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow][k];
                Expr::binary(op, l, r)
            }),
            (inner, 0..5usize).prop_map(|(e, k)| Expr::Call(Func::ALL[k], Box::new(e))),
        ]
    })
}

fn int_literal(e: &Expr) -> Option<i32> {
    let k = match e {
        Expr::Const(k) => *k,
        Expr::Neg(inner) => match **inner {
            Expr::Const(k) => -k,
            _ => return None,
        },
        _ => return None,
    };
    (k.fract() == 0.0 && k.abs() <= 64.0).then_some(k as i32)
}

/// Direct tree-walking evaluation, the oracle for the stack machine.
fn walk(e: &Expr, x: &[f64], a: f64) -> f64 {
    match e {
        Expr::Const(v) => *v,
        Expr::Pi => std::f64::consts::PI,
        Expr::Var(i) => x[*i],
        Expr::Param(_) => a,
        Expr::Neg(e) => -walk(e, x, a),
        Expr::Binary(op, l, r) => {
            let (l, rv) = (walk(l, x, a), walk(r, x, a));
            match op {
                BinOp::Add => l + rv,
                BinOp::Sub => l - rv,
                BinOp::Mul => l * rv,
                BinOp::Div => l / rv,
                // Integer literal exponents, possibly negated, use powi.
                BinOp::Pow => match int_literal(r) {
                    Some(k) => l.powi(k),
                    None => l.powf(rv),
                },
            }
        }
        Expr::Call(f, e) => {
            let v = walk(e, x, a);
            match f {
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Exp => v.exp(),
                Func::Abs => v.abs(),
                Func::Sqrt => v.sqrt(),
            }
        }
    }
}

fn same(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
}

fn small_source(arity: usize) -> impl Strategy<Value = String> {
    let names = ["x1", "x2", "x3", "x4"];
    let atom = prop_oneof![
        (0..arity).prop_map(move |i| names[i].to_string()),
        (-1.0f64..1.0).prop_map(|v| format!("({v})")),
    ];
    atom.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| format!("({l} + {r})")),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| format!("({l} * {r})")),
            (inner.clone(), inner).prop_map(|(l, r)| format!("({l} * (1 - {r}))")),
        ]
    })
}

proptest! {
    #[test]
    fn printed_form_parses_back(e in expr(3)) {
        let names = vec!["a".to_string()];
        let back = parse(&e.to_string(), 3, &names).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn stack_machine_matches_tree_walk(
        e in expr(3),
        x in proptest::array::uniform3(-2.0f64..2.0),
        a in -3.0f64..3.0,
    ) {
        let prog = compile_ast(&e, 3, &["a".to_string()]).unwrap();
        prop_assert!(prog.max_stack() >= 1);
        let got = prog.eval(&x, &[a]).unwrap();
        prop_assert!(same(got, walk(&e, &x, a)), "{} at {:?}", e, x);
    }

    #[test]
    fn f_and_v_agree_for_one_component(
        (n, src, seeds) in (1usize..=4).prop_flat_map(|n| {
            (Just(n), small_source(n), proptest::collection::vec(-1.0f64..1.0, n))
        })
    ) {
        let spec = MapSpec::<f64>::from_sources(n, &[src], &[]).unwrap();
        let f = iterate(&spec, Scheme::F, &seeds, 50).unwrap();
        let v = iterate(&spec, Scheme::V, &seeds, 50).unwrap();
        prop_assert_eq!(f, v);
    }

    #[test]
    fn v_is_classical_iteration_when_n_equals_m(
        (n, srcs, seeds) in (1usize..=3).prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(small_source(n), n),
                proptest::collection::vec(-1.0f64..1.0, n),
            )
        })
    ) {
        let spec = MapSpec::<f64>::from_sources(n, &srcs, &[]).unwrap();
        let v = iterate(&spec, Scheme::V, &seeds, 45).unwrap();
        let mut x = seeds.clone();
        let mut classical = seeds.clone();
        while classical.len() < 45 {
            x = spec.eval(&x).unwrap();
            classical.extend_from_slice(&x);
        }
        let cut = classical
            .iter()
            .position(|u| !u.is_finite() || u.abs() > 1e100)
            .unwrap_or(45);
        classical.truncate(cut.min(45));
        prop_assert_eq!(v.values, classical);
    }

    #[test]
    fn bilinear_diagonal_closed_forms(
        zr in -1.5f64..1.5, zi in -1.5f64..1.5, cr in -1.5f64..1.5, ci in -1.5f64..1.5,
    ) {
        let (z, c) = (Complex64::new(zr, zi), Complex64::new(cr, ci));
        let spec = MapSpec::from_sources(2, &["z*w + c"], &[("c", c)]).unwrap();
        let u = iterate(&spec, Scheme::F, &[z, z], 5).unwrap().values;
        let want = [
            z * z + c,
            z * z * z + z * c + c,
            z.powi(5) + 2.0 * z.powi(3) * c + z * c * c + c * z * z + c * c + c,
        ];
        for (got, w) in u[2..].iter().zip(want) {
            prop_assert!((got - w).norm() <= 1e-12 * w.norm().max(1.0));
        }
    }
}
