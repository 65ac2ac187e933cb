use crate::detpoly::HermitianMatrix;
use crate::poly::{DensePoly, MultiAffinePoly, PolyJson};
use crate::rng::DEFAULT_SEED;
use crate::sep::{CubeDistribution, SepGenerator};
use crate::Error;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Deserialize;
use sha2::{Digest, Sha256};
use std::cell::RefCell;
use std::path::Path;

pub const SEED_ENV: &str = "STABLEKIT_SEED";

/// Failure that maps to exit code 3.
#[derive(Debug)]
pub struct InputError(pub String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

impl From<std::io::Error> for InputError {
    fn from(e: std::io::Error) -> Self {
        InputError(e.to_string())
    }
}

impl From<csv::Error> for InputError {
    fn from(e: csv::Error) -> Self {
        InputError(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for InputError {
    fn from(e: serde_json::Error) -> Self {
        InputError(format!("json: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, InputError>;

pub fn parse_seed(s: &str) -> CliResult<u64> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|_| InputError(format!("bad seed {s:?}")))
}

/// `--seed`, then the environment, then the default.
pub fn resolve_seed(flag: Option<&str>) -> CliResult<u64> {
    match flag {
        Some(s) => parse_seed(s),
        None => match std::env::var(SEED_ENV) {
            Ok(s) => parse_seed(&s),
            Err(_) => Ok(DEFAULT_SEED),
        },
    }
}

/// Reads input files and folds their bytes into the report digest.
pub struct Inputs {
    hasher: RefCell<Sha256>,
}

impl Inputs {
    pub fn new(command: &str, args_json: &str) -> Self {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update([0]);
        h.update(args_json.as_bytes());
        Inputs { hasher: RefCell::new(h) }
    }

    pub fn read(&self, path: &Path) -> CliResult<String> {
        let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
        let mut h = self.hasher.borrow_mut();
        h.update([0]);
        h.update(text.as_bytes());
        Ok(text)
    }

    pub fn digest(&self) -> String {
        hex::encode(self.hasher.borrow().clone().finalize())
    }

    pub fn poly(&self, path: &Path) -> CliResult<DensePoly> {
        Ok(PolyJson::parse(&self.read(path)?)?.to_dense()?)
    }

    pub fn multiaffine(&self, path: &Path) -> CliResult<MultiAffinePoly> {
        Ok(self.poly(path)?.to_multiaffine()?)
    }

    pub fn hermitian(&self, path: &Path) -> CliResult<HermitianMatrix> {
        let m: MatrixJson = serde_json::from_str(&self.read(path)?)?;
        m.to_hermitian()
    }

    /// Plain comma-separated rows, no header.
    pub fn csv_matrix(&self, path: &Path) -> CliResult<DMatrix<f64>> {
        let text = self.read(path)?;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
        for rec in rdr.records() {
            let rec = rec?;
            let row = rec.iter().map(|v| v.parse::<f64>().map_err(|_| InputError(format!("bad number {v:?}")))).collect::<CliResult<Vec<_>>>()?;
            rows.push(row);
        }
        dense_rows(&rows)
    }
}

fn dense_rows(rows: &[Vec<f64>]) -> CliResult<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(InputError("matrix rows must be nonempty and of equal length".into()));
    }
    Ok(DMatrix::from_fn(n, rows[0].len(), |i, j| rows[i][j]))
}

/// `[[..], ..]` or `{"n": n, "re": [[..]], "im": [[..]]}` with `n` and `im` optional.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum MatrixJson {
    Plain(Vec<Vec<f64>>),
    Parts {
        #[serde(default)]
        n: Option<usize>,
        re: Vec<Vec<f64>>,
        #[serde(default)]
        im: Option<Vec<Vec<f64>>>,
    },
}

impl MatrixJson {
    pub fn to_hermitian(&self) -> CliResult<HermitianMatrix> {
        let (re, im) = match self {
            MatrixJson::Plain(r) => (r, None),
            MatrixJson::Parts { n, re, im } => {
                if n.is_some_and(|n| n != re.len()) {
                    return Err(InputError(format!("declared n = {} but {} rows given", n.unwrap_or(0), re.len())));
                }
                (re, im.as_ref())
            }
        };
        let re = dense_rows(re)?;
        let im = match im {
            Some(v) => dense_rows(v)?,
            None => DMatrix::zeros(re.nrows(), re.ncols()),
        };
        if im.shape() != re.shape() {
            return Err(InputError("real and imaginary parts differ in shape".into()));
        }
        Ok(HermitianMatrix::new(DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| Complex64::new(re[(i, j)], im[(i, j)])))?)
    }
}

#[derive(Debug, Deserialize)]
pub struct PencilJson {
    pub matrices: Vec<MatrixJson>,
}

fn site(s: &str, m: usize) -> CliResult<usize> {
    let k: usize = s.trim().parse().map_err(|_| InputError(format!("bad site {s:?}")))?;
    if k == 0 || k > m {
        return Err(InputError(format!("site {k} outside 1..={m}")));
    }
    Ok(k - 1)
}

fn rate(s: &str) -> CliResult<f64> {
    s.trim().parse().map_err(|_| InputError(format!("bad rate {s:?}")))
}

fn items(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty())
}

pub fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    items(s).map(|v| v.parse().map_err(|_| InputError(format!("bad number {v:?}")))).collect()
}

pub fn parse_usize_list(s: &str) -> CliResult<Vec<usize>> {
    items(s).map(|v| v.parse().map_err(|_| InputError(format!("bad integer {v:?}")))).collect()
}

/// Sites are 1-based: edges `"1-2:1.0"`, hops `"1>2:0.7"`, creation and
/// annihilation `"1:0.5"`.
pub fn parse_generator(m: usize, edges: &str, hops: &str, create: &str, annihilate: &str) -> CliResult<SepGenerator> {
    let mut g = SepGenerator::new(m);
    for e in items(edges) {
        let (pair, r) = e.split_once(':').ok_or_else(|| InputError(format!("edge {e:?} needs i-j:rate")))?;
        let (i, j) = pair.split_once('-').ok_or_else(|| InputError(format!("edge {e:?} needs i-j:rate")))?;
        g = g.edge(site(i, m)?, site(j, m)?, rate(r)?)?;
    }
    for h in items(hops) {
        let (pair, r) = h.split_once(':').ok_or_else(|| InputError(format!("hop {h:?} needs i>j:rate")))?;
        let (i, j) = pair.split_once('>').ok_or_else(|| InputError(format!("hop {h:?} needs i>j:rate")))?;
        g = g.hop(site(i, m)?, site(j, m)?, rate(r)?)?;
    }
    for c in items(create) {
        let (i, r) = c.split_once(':').ok_or_else(|| InputError(format!("{c:?} needs i:rate")))?;
        g = g.create(site(i, m)?, rate(r)?)?;
    }
    for a in items(annihilate) {
        let (i, r) = a.split_once(':').ok_or_else(|| InputError(format!("{a:?} needs i:rate")))?;
        g = g.annihilate(site(i, m)?, rate(r)?)?;
    }
    Ok(g)
}

pub fn parse_init(m: usize, s: &str) -> CliResult<CubeDistribution> {
    let occ = items(s)
        .map(|v| match v {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(InputError(format!("occupation {v:?} must be 0 or 1"))),
        })
        .collect::<CliResult<Vec<bool>>>()?;
    if occ.len() != m {
        return Err(InputError(format!("--init lists {} sites, expected {m}", occ.len())));
    }
    Ok(CubeDistribution::from_occupation(&occ)?)
}
