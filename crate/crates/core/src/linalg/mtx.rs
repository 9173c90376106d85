//! Matrix Market coordinate format, used for debugging dumps.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use super::csr::CsrMatrix;

pub fn write_matrix_market(path: &Path, m: &CsrMatrix) -> io::Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for i in 0..m.nrows() {
        let (cols, vals) = m.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
        }
    }
    w.flush()
}

pub fn read_matrix_market(path: &Path) -> io::Result<CsrMatrix> {
    let text = fs::read_to_string(path)?;
    let bad = |line: usize, msg: &str| {
        io::Error::new(
            io::ErrorKind::InvalidData,
            format!("{}:{}: {}", path.display(), line, msg),
        )
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    let header = header.to_ascii_lowercase();
    if !header.starts_with("%%matrixmarket matrix coordinate real") {
        return Err(bad(1, "only 'matrix coordinate real' files are supported"));
    }
    let symmetric = header.contains("symmetric");
    let mut size = None;
    let mut triplets = Vec::new();
    for (k, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if size.is_none() {
            let parse = |s: &str| s.parse::<usize>().map_err(|_| bad(k + 1, "bad size line"));
            if fields.len() != 3 {
                return Err(bad(k + 1, "size line needs three integers"));
            }
            size = Some((parse(fields[0])?, parse(fields[1])?));
            continue;
        }
        if fields.len() != 3 {
            return Err(bad(k + 1, "entry line needs 'row col value'"));
        }
        let (nr, nc) = size.unwrap();
        let i: usize = fields[0].parse().map_err(|_| bad(k + 1, "bad row index"))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| bad(k + 1, "bad column index"))?;
        let v: f64 = fields[2].parse().map_err(|_| bad(k + 1, "bad value"))?;
        if i == 0 || j == 0 || i > nr || j > nc {
            return Err(bad(k + 1, "index out of range"));
        }
        triplets.push((i - 1, j - 1, v));
        if symmetric && i != j {
            triplets.push((j - 1, i - 1, v));
        }
    }
    let (nr, nc) = size.ok_or_else(|| bad(1, "missing size line"))?;
    Ok(CsrMatrix::from_triplets(nr, nc, &triplets))
}
