//! Flat postfix form of an expression for fast repeated evaluation.

use super::expr::{BinOp, Expr, Func};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Instr {
    Const(f64),
    Var(u32),
    Neg,
    Bin(BinOp),
    /// `top <op> c`
    BinConstRhs(BinOp, f64),
    /// `c <op> top`
    BinConstLhs(BinOp, f64),
    PowI(i32),
    Call(Func),
}

const INLINE_STACK: usize = 32;

/// Compiled expression. Evaluation is allocation-free for stack depths up to 32.
#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    code: Vec<Instr>,
    depth: usize,
}

impl Program {
    pub fn compile(expr: &Expr) -> Program {
        let folded = fold(expr);
        let mut code = Vec::new();
        emit(&folded, &mut code);
        let depth = max_depth(&code);
        Program { code, depth }
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        if self.depth <= INLINE_STACK {
            let mut stack = [0.0f64; INLINE_STACK];
            run(&self.code, x, &mut stack)
        } else {
            let mut stack = vec![0.0f64; self.depth];
            run(&self.code, x, &mut stack)
        }
    }
}

#[inline(always)]
fn run(code: &[Instr], x: &[f64], stack: &mut [f64]) -> f64 {
    let mut sp = 0usize;
    for ins in code {
        match *ins {
            Instr::Const(c) => {
                stack[sp] = c;
                sp += 1;
            }
            Instr::Var(i) => {
                stack[sp] = x[i as usize];
                sp += 1;
            }
            Instr::Neg => stack[sp - 1] = -stack[sp - 1],
            Instr::Bin(op) => {
                sp -= 1;
                stack[sp - 1] = op.apply(stack[sp - 1], stack[sp]);
            }
            Instr::BinConstRhs(op, c) => stack[sp - 1] = op.apply(stack[sp - 1], c),
            Instr::BinConstLhs(op, c) => stack[sp - 1] = op.apply(c, stack[sp - 1]),
            Instr::PowI(k) => stack[sp - 1] = stack[sp - 1].powi(k),
            Instr::Call(f) => stack[sp - 1] = f.apply(stack[sp - 1]),
        }
    }
    stack[0]
}

fn is_const(e: &Expr) -> Option<f64> {
    match e {
        Expr::Const(c) => Some(*c),
        _ => None,
    }
}

/// Folds variable-free subtrees whose value is finite.
fn fold(e: &Expr) -> Expr {
    let folded = match e {
        Expr::Const(_) | Expr::Var(_) => return e.clone(),
        Expr::Neg(a) => Expr::Neg(Box::new(fold(a))),
        Expr::Call(f, a) => Expr::Call(*f, Box::new(fold(a))),
        Expr::Binary(op, a, b) => Expr::Binary(*op, Box::new(fold(a)), Box::new(fold(b))),
    };
    let constant = match &folded {
        Expr::Neg(a) => is_const(a).map(|v| -v),
        Expr::Call(f, a) => is_const(a).map(|v| f.apply(v)),
        Expr::Binary(op, a, b) => match (is_const(a), is_const(b)) {
            (Some(x), Some(y)) => Some(op.apply(x, y)),
            _ => None,
        },
        _ => None,
    };
    match constant {
        Some(v) if v.is_finite() => Expr::Const(v),
        _ => folded,
    }
}

fn emit(e: &Expr, code: &mut Vec<Instr>) {
    match e {
        Expr::Const(c) => code.push(Instr::Const(*c)),
        Expr::Var(i) => code.push(Instr::Var(*i as u32)),
        Expr::Neg(a) => {
            emit(a, code);
            code.push(Instr::Neg);
        }
        Expr::Call(f, a) => {
            emit(a, code);
            code.push(Instr::Call(*f));
        }
        Expr::Binary(BinOp::Pow, a, b) => match is_const(b) {
            Some(k) if k.fract() == 0.0 && k.abs() <= i32::MAX as f64 => {
                emit(a, code);
                code.push(Instr::PowI(k as i32));
            }
            _ => {
                emit(a, code);
                emit(b, code);
                code.push(Instr::Bin(BinOp::Pow));
            }
        },
        Expr::Binary(op, a, b) => match (is_const(a), is_const(b)) {
            (_, Some(c)) => {
                emit(a, code);
                code.push(Instr::BinConstRhs(*op, c));
            }
            (Some(c), None) => {
                emit(b, code);
                code.push(Instr::BinConstLhs(*op, c));
            }
            (None, None) => {
                emit(a, code);
                emit(b, code);
                code.push(Instr::Bin(*op));
            }
        },
    }
}

fn max_depth(code: &[Instr]) -> usize {
    let mut sp = 0usize;
    let mut max = 0;
    for ins in code {
        match ins {
            Instr::Const(_) | Instr::Var(_) => sp += 1,
            Instr::Bin(_) => sp -= 1,
            _ => {}
        }
        max = max.max(sp);
    }
    max
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parser::parse;

    #[test]
    fn matches_tree_evaluation() {
        let cases = [
            "x1 + 2*x2",
            "sqrt(6) / (1 + exp(-3*(x1-5) + 0.2*(x2-15) - 2*(x3-2/7) - 5*x4))",
            "x1^2 - x2^3 + 2^x1",
            "-(x1 - 3) / (2 - x2)",
            "abs(x3) ^ 0.5 + log(1 + x4^2)",
            "sin(pi * x1) * cos(x2) - 1 / x3",
        ];
        let points = [
            [5.0, 15.0, 2.0 / 7.0, 0.0],
            [0.3, -1.2, 4.0, -2.5],
            [-0.7, 2.2, 0.01, 11.0],
        ];
        for text in cases {
            let e = parse(text, 4).unwrap();
            let p = Program::compile(&e);
            for x in &points {
                let (a, b) = (e.eval(x), p.eval(x));
                assert!(
                    a.to_bits() == b.to_bits() || (a - b).abs() <= 1e-12 * a.abs().max(1.0),
                    "{text} at {x:?}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn deep_expressions_use_heap_stack() {
        // Right-nested sum needs one stack slot per term.
        let mut text = String::from("x1");
        for _ in 0..40 {
            text = format!("x1 + ({text})");
        }
        let e = parse(&text, 1).unwrap();
        let p = Program::compile(&e);
        assert!(p.depth > INLINE_STACK);
        assert_eq!(p.eval(&[1.0]), 41.0);
    }

    #[test]
    fn folds_constants() {
        let e = parse("0.5 * (pi - 1/pi) + x1", 1).unwrap();
        let p = Program::compile(&e);
        assert_eq!(p.code.len(), 2);
    }
}
