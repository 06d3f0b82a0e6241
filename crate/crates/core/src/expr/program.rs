use super::ast::{BinOp, Expr, Func};
use super::parser::parse;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One stack-machine instruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Instr {
    Const(f64),
    Var(u16),
    Param(u16),
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    /// Power with an integer literal exponent.
    PowI(i32),
    Call(Func),
}

impl Instr {
    /// (values popped, values pushed)
    fn stack_effect(self) -> (usize, usize) {
        match self {
            Instr::Const(_) | Instr::Var(_) | Instr::Param(_) => (0, 1),
            Instr::Neg | Instr::PowI(_) | Instr::Call(_) => (1, 1),
            Instr::Add | Instr::Sub | Instr::Mul | Instr::Div | Instr::Pow => (2, 1),
        }
    }
}

/// Immutable stack program for one scalar component `g_j(x1..xn)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledProgram {
    code: Vec<Instr>,
    arity: usize,
    n_params: usize,
    max_stack: usize,
}

/// Parses and compiles `source` over `arity` variables and the named parameters.
pub fn compile(source: &str, arity: usize, parameter_names: &[String]) -> Result<CompiledProgram> {
    let ast = parse(source, arity, parameter_names)?;
    compile_ast(&ast, arity, parameter_names)
}

/// Compiles an already parsed expression.
pub fn compile_ast(
    ast: &Expr,
    arity: usize,
    parameter_names: &[String],
) -> Result<CompiledProgram> {
    let mut code = Vec::new();
    emit(ast, arity, parameter_names, &mut code)?;
    CompiledProgram::from_instructions(code, arity, parameter_names.len())
}

fn integer_exponent(e: &Expr) -> Option<i32> {
    let v = match e {
        Expr::Const(v) => *v,
        Expr::Neg(inner) => match **inner {
            Expr::Const(v) => -v,
            _ => return None,
        },
        _ => return None,
    };
    (v.fract() == 0.0 && v.abs() <= 64.0).then_some(v as i32)
}

fn emit(e: &Expr, arity: usize, params: &[String], code: &mut Vec<Instr>) -> Result<()> {
    match e {
        Expr::Const(v) => code.push(Instr::Const(*v)),
        Expr::Pi => code.push(Instr::Const(std::f64::consts::PI)),
        Expr::Var(i) => {
            if *i >= arity {
                return Err(Error::VariableOutOfRange {
                    name: format!("x{}", i + 1),
                    offset: 0,
                    arity,
                });
            }
            code.push(Instr::Var(*i as u16));
        }
        Expr::Param(name) => {
            let k = params
                .iter()
                .position(|p| p == name)
                .ok_or_else(|| Error::UnknownIdentifier {
                    name: name.clone(),
                    offset: 0,
                })?;
            code.push(Instr::Param(k as u16));
        }
        Expr::Neg(inner) => {
            emit(inner, arity, params, code)?;
            code.push(Instr::Neg);
        }
        Expr::Binary(BinOp::Pow, base, exponent) => {
            emit(base, arity, params, code)?;
            if let Some(k) = integer_exponent(exponent) {
                code.push(Instr::PowI(k));
            } else {
                emit(exponent, arity, params, code)?;
                code.push(Instr::Pow);
            }
        }
        Expr::Binary(op, l, r) => {
            emit(l, arity, params, code)?;
            emit(r, arity, params, code)?;
            code.push(match op {
                BinOp::Add => Instr::Add,
                BinOp::Sub => Instr::Sub,
                BinOp::Mul => Instr::Mul,
                BinOp::Div => Instr::Div,
                BinOp::Pow => unreachable!(),
            });
        }
        Expr::Call(func, arg) => {
            emit(arg, arity, params, code)?;
            code.push(Instr::Call(*func));
        }
    }
    Ok(())
}

impl CompiledProgram {
    /// Validates an instruction list: every index in range, no stack
    /// underflow, net stack effect exactly +1.
    pub fn from_instructions(code: Vec<Instr>, arity: usize, n_params: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidProgram("arity must be at least 1".into()));
        }
        let mut depth = 0usize;
        let mut max_stack = 0usize;
        for (pc, ins) in code.iter().enumerate() {
            match *ins {
                Instr::Var(i) if i as usize >= arity => {
                    return Err(Error::InvalidProgram(format!(
                        "instruction {pc}: variable {i} outside arity {arity}"
                    )))
                }
                Instr::Param(k) if k as usize >= n_params => {
                    return Err(Error::InvalidProgram(format!(
                        "instruction {pc}: parameter {k} outside count {n_params}"
                    )))
                }
                _ => {}
            }
            let (pop, push) = ins.stack_effect();
            if depth < pop {
                return Err(Error::InvalidProgram(format!(
                    "instruction {pc}: stack underflow"
                )));
            }
            depth = depth - pop + push;
            max_stack = max_stack.max(depth);
        }
        if depth != 1 {
            return Err(Error::InvalidProgram(format!(
                "net stack effect is {depth}, expected 1"
            )));
        }
        Ok(CompiledProgram {
            code,
            arity,
            n_params,
            max_stack,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn parameter_count(&self) -> usize {
        self.n_params
    }

    /// Stack slots needed by [`eval_with`](Self::eval_with).
    pub fn max_stack(&self) -> usize {
        self.max_stack
    }

    pub fn instructions(&self) -> &[Instr] {
        &self.code
    }

    /// Evaluates with length checks. Division by zero and similar produce
    /// non-finite scalars, not errors.
    pub fn eval<S: Scalar>(&self, inputs: &[S], params: &[S]) -> Result<S> {
        if inputs.len() != self.arity {
            return Err(Error::LengthMismatch {
                what: "inputs",
                expected: self.arity,
                got: inputs.len(),
            });
        }
        if params.len() != self.n_params {
            return Err(Error::LengthMismatch {
                what: "parameters",
                expected: self.n_params,
                got: params.len(),
            });
        }
        let mut stack = vec![S::zero(); self.max_stack];
        Ok(self.eval_with(inputs, params, &mut stack))
    }

    /// Hot-path evaluation with a caller-provided scratch stack of at least
    /// [`max_stack`](Self::max_stack) slots.
    ///
    /// # Panics
    ///
    /// If `inputs`, `params` or `stack` are shorter than the program requires.
    #[inline]
    pub fn eval_with<S: Scalar>(&self, inputs: &[S], params: &[S], stack: &mut [S]) -> S {
        let mut sp = 0usize;
        for ins in &self.code {
            match *ins {
                Instr::Const(c) => {
                    stack[sp] = S::from_real(c);
                    sp += 1;
                }
                Instr::Var(i) => {
                    stack[sp] = inputs[i as usize];
                    sp += 1;
                }
                Instr::Param(k) => {
                    stack[sp] = params[k as usize];
                    sp += 1;
                }
                Instr::Neg => stack[sp - 1] = -stack[sp - 1],
                Instr::Add => {
                    sp -= 1;
                    stack[sp - 1] = stack[sp - 1] + stack[sp];
                }
                Instr::Sub => {
                    sp -= 1;
                    stack[sp - 1] = stack[sp - 1] - stack[sp];
                }
                Instr::Mul => {
                    sp -= 1;
                    stack[sp - 1] = stack[sp - 1] * stack[sp];
                }
                Instr::Div => {
                    sp -= 1;
                    stack[sp - 1] = stack[sp - 1] / stack[sp];
                }
                Instr::Pow => {
                    sp -= 1;
                    stack[sp - 1] = stack[sp - 1].pow(stack[sp]);
                }
                Instr::PowI(k) => stack[sp - 1] = stack[sp - 1].int_pow(k),
                Instr::Call(func) => {
                    let v = stack[sp - 1];
                    stack[sp - 1] = match func {
                        Func::Sin => v.sine(),
                        Func::Cos => v.cosine(),
                        Func::Exp => v.exponential(),
                        Func::Abs => v.abs_value(),
                        Func::Sqrt => v.square_root(),
                    };
                }
            }
        }
        stack[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn product_logistic_at_two_thirds() {
        let prog = compile("a*x*(1-x)*y*(1-y)", 2, &names(&["a"])).unwrap();
        assert_eq!(prog.arity(), 2);
        assert_eq!(prog.parameter_count(), 1);
        let v: f64 = prog.eval(&[2.0 / 3.0, 2.0 / 3.0], &[13.5]).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn fibonacci_component() {
        let prog = compile("x + y", 2, &[]).unwrap();
        assert_eq!(prog.eval(&[1.0, 1.0], &[]).unwrap(), 2.0);
    }

    #[test]
    fn complex_bilinear() {
        let prog = compile("z*w + c", 2, &names(&["c"])).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let v = prog
            .eval(&[Complex64::new(2.0, 0.0), Complex64::new(5.0, 0.0)], &[one])
            .unwrap();
        assert_eq!(v, Complex64::new(11.0, 0.0));
    }

    #[test]
    fn malformed_source() {
        assert!(matches!(compile("x *", 1, &[]), Err(Error::Syntax { .. })));
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        let prog = compile("x + y", 2, &[]).unwrap();
        assert!(matches!(
            prog.eval(&[1.0], &[]),
            Err(Error::LengthMismatch { what: "inputs", .. })
        ));
        assert!(matches!(
            prog.eval(&[1.0, 2.0], &[3.0]),
            Err(Error::LengthMismatch {
                what: "parameters",
                ..
            })
        ));
    }

    #[test]
    fn division_by_zero_is_non_finite() {
        let prog = compile("1/(x - x)", 1, &[]).unwrap();
        assert!(!prog.eval(&[0.3f64], &[]).unwrap().is_finite());
    }

    #[test]
    fn functions_and_pi() {
        let prog = compile("sin(pi*x) + cos(0) + exp(0) + abs(-2) + sqrt(9)", 1, &[]).unwrap();
        let v = prog.eval(&[0.5f64], &[]).unwrap();
        assert!((v - 8.0).abs() < 1e-15);
        let prog = compile("abs(x)", 1, &[]).unwrap();
        let v = prog.eval(&[Complex64::new(3.0, -4.0)], &[]).unwrap();
        assert_eq!(v, Complex64::new(5.0, 0.0));
    }

    #[test]
    fn integer_exponents_use_powi() {
        let prog = compile("x^3 + x^-1 + x^0.5", 1, &[]).unwrap();
        let code = prog.instructions();
        assert!(code.contains(&Instr::PowI(3)));
        assert!(code.contains(&Instr::PowI(-1)));
        assert!(code.contains(&Instr::Pow));
        let v = prog.eval(&[4.0f64], &[]).unwrap();
        assert!((v - (64.0 + 0.25 + 2.0)).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_instruction_lists() {
        use Instr::*;
        assert!(CompiledProgram::from_instructions(vec![Add], 1, 0).is_err());
        assert!(CompiledProgram::from_instructions(vec![Var(0), Var(0)], 1, 0).is_err());
        assert!(CompiledProgram::from_instructions(vec![], 1, 0).is_err());
        assert!(CompiledProgram::from_instructions(vec![Var(1)], 1, 0).is_err());
        assert!(CompiledProgram::from_instructions(vec![Param(0)], 1, 0).is_err());
        let ok = CompiledProgram::from_instructions(vec![Var(0), Const(2.0), Mul], 1, 0).unwrap();
        assert_eq!(ok.max_stack(), 2);
    }
}
