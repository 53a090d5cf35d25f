use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// A background dataset: `K` observations of `n` real-valued features, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    names: Vec<String>,
    n: usize,
}

impl Dataset {
    pub fn new(names: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::data("dataset has no columns"));
        }
        if rows.is_empty() {
            return Err(Error::data("dataset has no rows"));
        }
        let mut values = Vec::with_capacity(rows.len() * n);
        for (k, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::data(format!(
                    "row {} has {} values, expected {n}",
                    k + 1,
                    row.len()
                )));
            }
            if let Some(c) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::data(format!(
                    "row {} column {} is not finite",
                    k + 1,
                    names[c]
                )));
            }
            values.extend_from_slice(row);
        }
        Ok(Dataset { values, names, n })
    }

    /// Builds a dataset with default column names `x1..xn`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        Self::new(default_names(n), rows)
    }

    /// Reads CSV: a header row of feature names followed by decimal rows.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let names: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
        let mut rows = Vec::new();
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .enumerate()
                .map(|(c, field)| {
                    field.parse::<f64>().map_err(|_| {
                        Error::data(format!(
                            "row {} column {}: {field:?} is not a decimal number",
                            k + 1,
                            c + 1
                        ))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Self::new(names, rows)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.names)?;
        for row in self.rows() {
            w.write_record(row.iter().map(|v| format!("{v:?}")))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| Error::data(e.to_string()))
    }

    /// Number of observations `K`.
    pub fn len(&self) -> usize {
        self.values.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of features `n`.
    pub fn n_features(&self) -> usize {
        self.n
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    #[inline]
    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k * self.n..(k + 1) * self.n]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n)
    }

    pub fn column_mean(&self, c: usize) -> f64 {
        self.rows().map(|r| r[c]).sum::<f64>() / self.len() as f64
    }

    /// Reorders columns so that new column `c` is old column `perm[c]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        let names = perm.iter().map(|&c| self.names[c].clone()).collect();
        let rows = self
            .rows()
            .map(|r| perm.iter().map(|&c| r[c]).collect())
            .collect();
        Dataset::new(names, rows)
    }
}

pub(crate) fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::contract(format!(
            "permutation has length {}, expected {n}",
            perm.len()
        )));
    }
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::contract(format!(
                "{perm:?} is not a permutation of 0..{n}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let text = "a,b,c\n1,2.5,-3\n0.125, 4e2 ,5\n";
        let d = Dataset::from_csv_reader(text.as_bytes()).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.n_features(), 3);
        assert_eq!(d.names(), ["a", "b", "c"]);
        assert_eq!(d.row(1), [0.125, 400.0, 5.0]);
        let again = Dataset::from_csv_reader(d.to_csv_string().unwrap().as_bytes()).unwrap();
        assert_eq!(again, d);
    }

    #[test]
    fn csv_rejects_bad_input() {
        assert!(Dataset::from_csv_reader("a,b\n1,\n".as_bytes()).is_err());
        assert!(Dataset::from_csv_reader("a,b\n1,x\n".as_bytes()).is_err());
        assert!(Dataset::from_csv_reader("a,b\n1,2,3\n".as_bytes()).is_err());
        assert!(Dataset::from_csv_reader("a,b\n".as_bytes()).is_err());
        assert!(Dataset::from_csv_reader("a,b\n1,NaN\n".as_bytes()).is_err());
    }

    #[test]
    fn permute_columns() {
        let d = Dataset::from_rows(vec![vec![1.0, 2.0, 3.0]]).unwrap();
        let p = d.permute_columns(&[2, 0, 1]).unwrap();
        assert_eq!(p.row(0), [3.0, 1.0, 2.0]);
        assert_eq!(p.names(), ["x3", "x1", "x2"]);
        assert!(d.permute_columns(&[0, 0, 1]).is_err());
    }
}
