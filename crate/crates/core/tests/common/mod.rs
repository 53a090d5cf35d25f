#![allow(dead_code)]

use mcgame::mc::{stream_rng, StreamId, StreamKind};
use mcgame::{Dataset, ModelSpec, Partition};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub model: ModelSpec,
    pub data: Dataset,
    pub x: Vec<f64>,
    pub partition: Partition,
}

pub fn rng(seed: u64, index: usize) -> ChaCha8Rng {
    stream_rng(seed, StreamId::new(StreamKind::Sampler, index, 0x7e57))
}

fn leaf(rng: &mut ChaCha8Rng, vars: &[usize]) -> String {
    if vars.is_empty() || rng.gen_bool(0.2) {
        format!("{:.3}", rng.gen_range(-2.0..2.0))
    } else {
        format!("x{}", vars[rng.gen_range(0..vars.len())] + 1)
    }
}

/// Random expression in the given 0-based variables; bounded on bounded inputs.
pub fn random_expr(rng: &mut ChaCha8Rng, vars: &[usize], depth: usize) -> String {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng, vars);
    }
    let sub = |rng: &mut ChaCha8Rng| random_expr(rng, vars, depth - 1);
    match rng.gen_range(0..8) {
        0 | 1 => format!("({} + {})", sub(rng), sub(rng)),
        2 => format!("({} - {})", sub(rng), sub(rng)),
        3 | 4 => format!("({} * {})", sub(rng), sub(rng)),
        5 => format!("sin({})", sub(rng)),
        6 => format!("exp(0.5 * {})", leaf(rng, vars)),
        _ => format!("({})^2", sub(rng)),
    }
}

/// Random expression that uses every variable in `vars` at least once.
pub fn random_model(rng: &mut ChaCha8Rng, n: usize, vars: &[usize]) -> ModelSpec {
    let mut text = random_expr(rng, vars, 3);
    for &v in vars {
        let c: f64 = rng.gen_range(0.2..1.5);
        let term = random_expr(rng, vars, 1);
        text.push_str(&format!(" + {c:.3} * x{} * cos({term})", v + 1));
    }
    ModelSpec::parse_expression(&text, n).expect("generated expression parses")
}

pub fn random_rows(rng: &mut ChaCha8Rng, rows: usize, n: usize) -> Dataset {
    Dataset::from_rows(
        (0..rows)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect())
            .collect(),
    )
    .unwrap()
}

pub fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> Partition {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in order {
        match groups.last_mut() {
            Some(g) if rng.gen_bool(0.5) => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    Partition::new(n, &groups).unwrap()
}

/// A random model on `n` features with a background dataset of `rows` rows.
pub fn random_instance(seed: u64, index: usize, n: usize, rows: usize) -> Instance {
    let mut rng = rng(seed, index);
    let vars: Vec<usize> = (0..n).collect();
    let model = random_model(&mut rng, n, &vars);
    let data = random_rows(&mut rng, rows, n);
    let x = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
    let partition = random_partition(&mut rng, n);
    Instance {
        model,
        data,
        x,
        partition,
    }
}

/// Relative-plus-absolute closeness.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}
