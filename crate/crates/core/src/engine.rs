//! Generalized F- and V-iteration of maps `f: A^n -> A^m` with `m <= n`.
//!
//! Both schemes start from `n` seed scalars `u_1..u_n`.
//!
//! * **F-iteration** emits one scalar per step: the scalar at global index
//!   `t + 1` is `g_j` applied to the immediately preceding `n` scalars, with
//!   `j = ((t - n) mod m) + 1`. The window slides by one.
//! * **V-iteration** emits a block of `m` scalars per step: all `m`
//!   components applied to the same window of `n` scalars. The window slides
//!   by `m`. With `n == m` this is ordinary iteration of the vector map.

use crate::error::{Error, Result};
use crate::expr::{compile, CompiledProgram};
use crate::families::FamilyKind;
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::str::FromStr;

/// Magnitude above which a sequence is treated as divergent.
pub const ESCAPE_CAP: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    F,
    V,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "F" | "f" => Ok(Scheme::F),
            "V" | "v" => Ok(Scheme::V),
            _ => Err(Error::InvalidArgument(format!("unknown scheme `{s}`"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::F => "F",
            Scheme::V => "V",
        })
    }
}

/// A map `A^n -> A^m` given by `m` compiled components of arity `n`, plus
/// bound parameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct MapSpec<S> {
    n: usize,
    m: usize,
    components: Vec<CompiledProgram>,
    sources: Vec<String>,
    param_names: Vec<String>,
    params: Vec<S>,
    family: Option<FamilyKind>,
}

impl<S: Scalar> MapSpec<S> {
    /// Builds a map from compiled components. `m` is the number of components.
    pub fn new(
        n: usize,
        components: Vec<CompiledProgram>,
        param_names: Vec<String>,
        params: Vec<S>,
    ) -> Result<Self> {
        let m = components.len();
        if n == 0 || m == 0 {
            return Err(Error::Dimension(format!(
                "n and m must be positive (n = {n}, m = {m})"
            )));
        }
        if m > n {
            return Err(Error::Dimension(format!("m = {m} exceeds n = {n}")));
        }
        if param_names.len() != params.len() {
            return Err(Error::LengthMismatch {
                what: "parameter values",
                expected: param_names.len(),
                got: params.len(),
            });
        }
        for (j, c) in components.iter().enumerate() {
            if c.arity() != n {
                return Err(Error::Dimension(format!(
                    "component {} has arity {}, expected {n}",
                    j + 1,
                    c.arity()
                )));
            }
            if c.parameter_count() != params.len() {
                return Err(Error::LengthMismatch {
                    what: "component parameters",
                    expected: params.len(),
                    got: c.parameter_count(),
                });
            }
        }
        Ok(MapSpec {
            n,
            m,
            sources: vec![String::new(); m],
            components,
            param_names,
            params,
            family: None,
        })
    }

    /// Compiles each source expression and binds the parameters.
    pub fn from_sources<T: AsRef<str>>(n: usize, sources: &[T], params: &[(&str, S)]) -> Result<Self> {
        let names: Vec<String> = params.iter().map(|(k, _)| k.to_string()).collect();
        let values: Vec<S> = params.iter().map(|(_, v)| *v).collect();
        let components = sources
            .iter()
            .map(|s| compile(s.as_ref(), n, &names))
            .collect::<Result<Vec<_>>>()?;
        let mut spec = MapSpec::new(n, components, names, values)?;
        spec.sources = sources.iter().map(|s| s.as_ref().to_string()).collect();
        Ok(spec)
    }

    pub(crate) fn with_family(mut self, family: FamilyKind) -> Self {
        self.family = Some(family);
        self
    }

    /// Domain dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Range dimension (number of components).
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn components(&self) -> &[CompiledProgram] {
        &self.components
    }

    /// Source text of each component, empty when built from programs.
    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    pub fn parameter_names(&self) -> &[String] {
        &self.param_names
    }

    pub fn parameters(&self) -> &[S] {
        &self.params
    }

    pub fn family(&self) -> Option<FamilyKind> {
        self.family
    }

    pub fn param(&self, name: &str) -> Option<S> {
        self.param_names
            .iter()
            .position(|p| p == name)
            .map(|k| self.params[k])
    }

    pub fn set_param(&mut self, name: &str, value: S) -> Result<()> {
        let k = self
            .param_names
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| Error::UnknownParameter(name.to_string()))?;
        self.params[k] = value;
        Ok(())
    }

    /// Copy of this map with one parameter rebound.
    pub fn with_param(&self, name: &str, value: S) -> Result<Self> {
        let mut spec = self.clone();
        spec.set_param(name, value)?;
        Ok(spec)
    }

    pub(crate) fn max_stack(&self) -> usize {
        self.components.iter().map(|c| c.max_stack()).max().unwrap_or(1)
    }

    /// Evaluates component `j` (zero-based) at `inputs` (length `n`).
    pub fn eval_component(&self, j: usize, inputs: &[S]) -> Result<S> {
        let c = self.components.get(j).ok_or_else(|| {
            Error::InvalidArgument(format!("component index {j} outside 0..{}", self.m))
        })?;
        c.eval(inputs, &self.params)
    }

    /// Evaluates all components at `inputs`.
    pub fn eval(&self, inputs: &[S]) -> Result<Vec<S>> {
        (0..self.m).map(|j| self.eval_component(j, inputs)).collect()
    }
}

/// Rolling state of one trajectory: the last `n` scalars and a count of all
/// scalars emitted so far (seeds included).
#[derive(Debug, Clone)]
pub struct IterState<S> {
    buf: Vec<S>,
    n: usize,
    produced: u64,
    scheme: Scheme,
    phase: usize,
    stack: Vec<S>,
    diverged: bool,
}

const COMPACT_SLACK: usize = 4096;

#[inline]
pub(crate) fn escaped<S: Scalar>(v: S) -> bool {
    !v.is_finite_scalar() || v.modulus() > ESCAPE_CAP
}

impl<S: Scalar> IterState<S> {
    pub fn new(spec: &MapSpec<S>, scheme: Scheme, seeds: &[S]) -> Result<Self> {
        if seeds.len() != spec.n {
            return Err(Error::LengthMismatch {
                what: "seeds",
                expected: spec.n,
                got: seeds.len(),
            });
        }
        let mut buf = Vec::with_capacity(spec.n + COMPACT_SLACK + spec.m);
        buf.extend_from_slice(seeds);
        Ok(IterState {
            buf,
            n: spec.n,
            produced: spec.n as u64,
            scheme,
            phase: 0,
            stack: vec![S::zero(); spec.max_stack()],
            diverged: seeds.iter().any(|&s| escaped(s)),
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// The last `n` scalars, oldest first.
    pub fn history(&self) -> &[S] {
        &self.buf[self.buf.len() - self.n..]
    }

    /// Total scalars emitted, seeds included.
    pub fn produced(&self) -> u64 {
        self.produced
    }

    /// `true` once any emitted scalar was non-finite or above [`ESCAPE_CAP`].
    pub fn diverged(&self) -> bool {
        self.diverged
    }

    /// Zero-based index of the component that produces the next scalar
    /// (always 0 for V, which emits whole blocks).
    pub fn next_component(&self) -> usize {
        self.phase
    }

    /// Advances one step and returns the newly emitted scalars: one for F,
    /// `m` for V.
    #[inline]
    pub fn step(&mut self, spec: &MapSpec<S>) -> &[S] {
        if self.buf.len() >= self.n + COMPACT_SLACK {
            let drop = self.buf.len() - self.n;
            self.buf.drain(..drop);
        }
        let start = self.buf.len();
        let window_start = start - self.n;
        match self.scheme {
            Scheme::F => {
                let j = self.phase;
                self.phase += 1;
                if self.phase == spec.m {
                    self.phase = 0;
                }
                let v = spec.components[j].eval_with(
                    &self.buf[window_start..],
                    &spec.params,
                    &mut self.stack,
                );
                self.buf.push(v);
            }
            Scheme::V => {
                for j in 0..spec.m {
                    let v = spec.components[j].eval_with(
                        &self.buf[window_start..start],
                        &spec.params,
                        &mut self.stack,
                    );
                    self.buf.push(v);
                }
            }
        }
        let emitted = &self.buf[start..];
        self.produced += emitted.len() as u64;
        if emitted.iter().any(|&v| escaped(v)) {
            self.diverged = true;
        }
        emitted
    }
}

/// Emitted sequence `u_1..u_count`, seeds first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceRecord<S> {
    pub values: Vec<S>,
    /// Set when iteration stopped at a non-finite or over-cap term; that term
    /// is not included.
    pub truncated: bool,
}

/// Produces `u_1..u_count` by the given scheme.
pub fn iterate<S: Scalar>(
    spec: &MapSpec<S>,
    scheme: Scheme,
    seeds: &[S],
    count: usize,
) -> Result<SequenceRecord<S>> {
    if count < spec.n {
        return Err(Error::InvalidArgument(format!(
            "count {count} is smaller than n = {}",
            spec.n
        )));
    }
    let mut state = IterState::new(spec, scheme, seeds)?;
    let mut values = Vec::with_capacity(count);
    for &s in seeds {
        if escaped(s) {
            return Ok(SequenceRecord {
                values,
                truncated: true,
            });
        }
        values.push(s);
    }
    while values.len() < count {
        for &v in state.step(spec) {
            if values.len() == count {
                break;
            }
            if escaped(v) {
                return Ok(SequenceRecord {
                    values,
                    truncated: true,
                });
            }
            values.push(v);
        }
    }
    Ok(SequenceRecord {
        values,
        truncated: false,
    })
}

impl<S: Scalar> SequenceRecord<S> {
    /// CSV with header `index,value` for real scalars or `index,re,im` for
    /// complex ones. Indices are 1-based.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if S::COMPLEX {
            out.push_str("index,re,im\n");
            for (i, v) in self.values.iter().enumerate() {
                let _ = writeln!(out, "{},{},{}", i + 1, v.re(), v.im());
            }
        } else {
            out.push_str("index,value\n");
            for (i, v) in self.values.iter().enumerate() {
                let _ = writeln!(out, "{},{}", i + 1, v.re());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn fib() -> MapSpec<f64> {
        MapSpec::from_sources(2, &["x + y"], &[]).unwrap()
    }

    #[test]
    fn fibonacci_sequence() {
        let rec = iterate(&fib(), Scheme::F, &[1.0, 1.0], 10).unwrap();
        assert_eq!(
            rec.values,
            vec![1.0, 1.0, 2.0, 3.0, 5.0, 8.0, 13.0, 21.0, 34.0, 55.0]
        );
        assert!(!rec.truncated);
    }

    #[test]
    fn fibonacci_step_from_history() {
        let spec = fib();
        let mut st = IterState::new(&spec, Scheme::F, &[3.0, 5.0]).unwrap();
        assert_eq!(st.step(&spec), &[8.0]);
        assert_eq!(st.history(), &[5.0, 8.0]);
        assert_eq!(st.produced(), 3);
    }

    #[test]
    fn v_identity_block() {
        let spec = MapSpec::<f64>::from_sources(2, &["x1", "x2"], &[]).unwrap();
        let mut st = IterState::new(&spec, Scheme::V, &[0.25, 0.75]).unwrap();
        assert_eq!(st.step(&spec), &[0.25, 0.75]);
    }

    #[test]
    fn f_step_cycles_components() {
        let spec = MapSpec::<f64>::from_sources(2, &["x+y", "x*y"], &[]).unwrap();
        let mut st = IterState::new(&spec, Scheme::F, &[1.0, 2.0]).unwrap();
        assert_eq!(st.step(&spec), &[3.0]);
        assert_eq!(st.step(&spec), &[6.0]);
        assert_eq!(st.step(&spec), &[9.0]);
        assert_eq!(st.step(&spec), &[54.0]);
    }

    #[test]
    fn v_with_n_equal_one_is_classical_orbit() {
        let spec = MapSpec::from_sources(1, &["3.7*x*(1-x)"], &[]).unwrap();
        let rec = iterate(&spec, Scheme::V, &[0.2f64], 6).unwrap();
        let mut x = 0.2f64;
        let mut expect = vec![x];
        for _ in 0..5 {
            x = 3.7 * x * (1.0 - x);
            expect.push(x);
        }
        assert_eq!(rec.values, expect);
    }

    #[test]
    fn complex_bilinear_recurrence() {
        let spec = MapSpec::from_sources(2, &["z*w + c"], &[("c", Complex64::new(1.0, 0.0))])
            .unwrap();
        let z = Complex64::new(2.0, 0.0);
        let rec = iterate(&spec, Scheme::F, &[z, z], 5).unwrap();
        let re: Vec<f64> = rec.values.iter().map(|v| v.re).collect();
        assert_eq!(re, vec![2.0, 2.0, 5.0, 11.0, 56.0]);
    }

    #[test]
    fn truncates_on_overflow() {
        let spec = MapSpec::from_sources(1, &["x*x"], &[]).unwrap();
        let rec = iterate(&spec, Scheme::F, &[10.0f64], 50).unwrap();
        assert!(rec.truncated);
        assert!(rec.values.iter().all(|v| v.abs() <= ESCAPE_CAP));
        assert_eq!(rec.values.len(), 7);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            MapSpec::<f64>::from_sources(1, &["x", "x"], &[]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            iterate(&fib(), Scheme::F, &[1.0], 5),
            Err(Error::LengthMismatch { what: "seeds", .. })
        ));
        assert!(iterate(&fib(), Scheme::F, &[1.0, 1.0], 1).is_err());
    }

    #[test]
    fn csv_layout() {
        let rec = iterate(&fib(), Scheme::F, &[1.0, 1.0], 3).unwrap();
        assert_eq!(rec.to_csv(), "index,value\n1,1\n2,1\n3,2\n");
        let spec = MapSpec::from_sources(1, &["x*x"], &[]).unwrap();
        let rec = iterate(&spec, Scheme::F, &[Complex64::new(0.0, 1.0)], 2).unwrap();
        assert_eq!(rec.to_csv(), "index,re,im\n1,0,1\n2,-1,0\n");
    }

    #[test]
    fn long_runs_survive_compaction() {
        let spec = MapSpec::from_sources(2, &["0.5*(x + y)"], &[]).unwrap();
        let a = iterate(&spec, Scheme::F, &[0.0f64, 1.0], 10_000).unwrap();
        let b = iterate(&spec, Scheme::F, &[0.0f64, 1.0], 20_000).unwrap();
        assert_eq!(&b.values[..10_000], &a.values[..]);
    }
}
