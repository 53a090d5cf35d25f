use std::fmt;

/// Binary arithmetic operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    pub(crate) fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            BinOp::Add => a + b,
            BinOp::Sub => a - b,
            BinOp::Mul => a * b,
            BinOp::Div => a / b,
            BinOp::Pow => pow(a, b),
        }
    }
}

/// Built-in unary functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sqrt,
    Abs,
    Log,
}

impl Func {
    pub const ALL: [Func; 6] = [
        Func::Exp,
        Func::Sin,
        Func::Cos,
        Func::Sqrt,
        Func::Abs,
        Func::Log,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Log => "log",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    #[inline]
    pub(crate) fn apply(self, x: f64) -> f64 {
        match self {
            Func::Exp => x.exp(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            // Out-of-domain arguments yield NaN, surfaced as a domain error by the caller.
            Func::Sqrt => x.sqrt(),
            Func::Abs => x.abs(),
            Func::Log => {
                if x > 0.0 {
                    x.ln()
                } else {
                    f64::NAN
                }
            }
        }
    }
}

/// Real exponentiation. A negative base needs an integer exponent.
#[inline]
pub(crate) fn pow(base: f64, exponent: f64) -> f64 {
    if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
        base.powi(exponent as i32)
    } else {
        // powf returns NaN for a negative base here.
        base.powf(exponent)
    }
}

/// Expression syntax tree over the variables `x1..xn` (stored 0-based).
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

// Binding strength used by the printer; matches the parser's grammar.
const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => PREC_ADD,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => PREC_MUL,
            Expr::Neg(_) => PREC_NEG,
            Expr::Binary(BinOp::Pow, ..) => PREC_POW,
            Expr::Const(_) | Expr::Var(_) | Expr::Call(..) => PREC_ATOM,
        }
    }

    /// Highest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        let mut max = None;
        self.visit_vars(&mut |i| max = Some(max.map_or(i, |m: usize| m.max(i))));
        max
    }

    pub fn visit_vars(&self, f: &mut impl FnMut(usize)) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(i) => f(*i),
            Expr::Neg(e) | Expr::Call(_, e) => e.visit_vars(f),
            Expr::Binary(_, a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
        }
    }

    /// Renames variables: `Var(i)` becomes `Var(map[i])`.
    pub fn rename_vars(&self, map: &[usize]) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(i) => Expr::Var(map[*i]),
            Expr::Neg(e) => Expr::Neg(Box::new(e.rename_vars(map))),
            Expr::Call(f, e) => Expr::Call(*f, Box::new(e.rename_vars(map))),
            Expr::Binary(op, a, b) => Expr::Binary(
                *op,
                Box::new(a.rename_vars(map)),
                Box::new(b.rename_vars(map)),
            ),
        }
    }

    /// Tree-walking evaluation; the reference semantics for the compiled program.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => x[*i],
            Expr::Neg(e) => -e.eval(x),
            Expr::Call(f, e) => f.apply(e.eval(x)),
            Expr::Binary(op, a, b) => op.apply(a.eval(x), b.eval(x)),
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // Debug formatting of f64 is the shortest text that parses back to the same value.
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.fmt_child(f, e.precedence() < PREC_NEG)
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Binary(BinOp::Pow, a, b) => {
                a.fmt_child(f, a.precedence() <= PREC_POW)?;
                write!(f, "^")?;
                b.fmt_child(f, b.precedence() < PREC_NEG)
            }
            Expr::Binary(op, a, b) => {
                let p = self.precedence();
                a.fmt_child(f, a.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                b.fmt_child(f, b.precedence() <= p)
            }
        }
    }
}
