//! Input format: a 4×4 binary matrix as four lines of four
//! whitespace-separated 0/1 tokens.

use std::path::Path;

use blockspin_core::BitMatrix;
use sha2::{Digest, Sha256};

/// A parsed input matrix together with the digest of the file bytes.
pub struct MatrixFile {
    pub matrix: BitMatrix,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn load(path: &Path) -> Result<MatrixFile, String> {
    let bytes = std::fs::read(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let sha256 = sha256_hex(&bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| format!("{}: not valid UTF-8", path.display()))?;
    let matrix = parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(MatrixFile { matrix, sha256 })
}

pub fn parse(text: &str) -> Result<BitMatrix, String> {
    let lines: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    if lines.len() != 4 {
        return Err(format!("expected 4 matrix rows, found {}", lines.len()));
    }
    let mut m = BitMatrix::zeros(4, 4);
    for (r, line) in lines.iter().enumerate() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 4 {
            return Err(format!(
                "row {}: expected 4 entries, found {}",
                r + 1,
                tokens.len()
            ));
        }
        for (c, tok) in tokens.iter().enumerate() {
            match *tok {
                "0" => {}
                "1" => m.set(r, c, true),
                other => {
                    return Err(format!(
                        "row {}, column {}: entry must be 0 or 1, found {other:?}",
                        r + 1,
                        c + 1
                    ))
                }
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_plain_matrix() {
        let m = parse("1 1 1 1\n0 1 1 0\n0 0 1 1\n1 0 0 0\n").unwrap();
        assert!(m.get(0, 3) && m.get(3, 0) && !m.get(1, 0));
    }

    #[test]
    fn tolerates_blank_lines_and_padding() {
        let m = parse("\n  1 0 0 0\n0 1 0 0\n\n0 0 1 0\n0 0 0 1  \n\n").unwrap();
        assert_eq!(m, BitMatrix::identity(4));
    }

    #[test]
    fn rejects_bad_shapes_and_tokens() {
        assert!(parse("1 1 1\n0 1 1 0\n0 0 1 1\n1 0 0 0").is_err());
        assert!(parse("1 1 1 1\n0 1 1 0\n0 0 1 1").is_err());
        assert!(parse("1 1 1 2\n0 1 1 0\n0 0 1 1\n1 0 0 0").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn digest_is_of_the_raw_bytes() {
        // sha256 of the empty string, a universally known constant
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
