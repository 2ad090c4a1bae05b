//! Flat binary layout for worker shares and partial results.
//!
//! Every word is a little-endian `u64`. A file starts with an 11-word header
//!
//! ```text
//! magic, version, q, K, L, T, m, N, r, s, c
//! ```
//!
//! followed by fixed-size records until end of file:
//!
//! * shares (`magic = "BPCSHARE"`): `worker_id, x, y`, then `A(x)` row-major
//!   (`r/K x s`), then the `m` B-derivatives row-major (`s x c/L` each);
//! * results (`magic = "BPCRSULT"`): `worker_id, order, x, y`, then the
//!   product row-major (`r/K x c/L`).
//!
//! Mask matrices have no representation here.

use std::io::{ErrorKind, Read, Write};

use super::{PartialResult, WorkerShare};
use crate::error::{Error, Result};
use crate::field::FieldOrder;
use crate::matrix::FieldMatrix;
use crate::poly::{EvalPoint, SchemeParams};

pub const SHARE_MAGIC: u64 = u64::from_le_bytes(*b"BPCSHARE");
pub const RESULT_MAGIC: u64 = u64::from_le_bytes(*b"BPCRSULT");
pub const VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub params: SchemeParams,
    pub r: usize,
    pub s: usize,
    pub c: usize,
}

impl Header {
    pub fn new(params: SchemeParams, r: usize, s: usize, c: usize) -> Result<Self> {
        if !r.is_multiple_of(params.k) || !c.is_multiple_of(params.l) {
            return Err(Error::Wire(format!(
                "dimensions r = {r}, c = {c} do not split into K = {}, L = {} blocks",
                params.k, params.l
            )));
        }
        Ok(Self { params, r, s, c })
    }

    fn a_block(&self) -> (usize, usize) {
        (self.r / self.params.k, self.s)
    }

    fn b_block(&self) -> (usize, usize) {
        (self.s, self.c / self.params.l)
    }

    fn product_block(&self) -> (usize, usize) {
        (self.r / self.params.k, self.c / self.params.l)
    }

    fn write<W: Write>(&self, magic: u64, w: &mut W) -> Result<()> {
        let p = &self.params;
        let words = [
            magic,
            VERSION,
            p.q.q(),
            p.k as u64,
            p.l as u64,
            p.t as u64,
            p.m as u64,
            p.n as u64,
            self.r as u64,
            self.s as u64,
            self.c as u64,
        ];
        write_words(w, &words)
    }

    fn read<R: Read>(magic: u64, rd: &mut R) -> Result<Self> {
        let mut words = [0u64; 11];
        for slot in &mut words {
            *slot = read_word(rd)?.ok_or_else(|| Error::Wire("truncated header".into()))?;
        }
        if words[0] != magic {
            return Err(Error::Wire(format!("unexpected magic {:#018x}", words[0])));
        }
        if words[1] != VERSION {
            return Err(Error::Wire(format!("unsupported version {}", words[1])));
        }
        let u = |v: u64| usize::try_from(v).map_err(|_| Error::Wire(format!("{v} overflows")));
        let params = SchemeParams::new(
            u(words[3])?,
            u(words[4])?,
            u(words[5])?,
            u(words[6])?,
            u(words[7])?,
            words[2],
        )?;
        Self::new(params, u(words[8])?, u(words[9])?, u(words[10])?)
    }
}

fn write_words<W: Write>(w: &mut W, words: &[u64]) -> Result<()> {
    let mut buf = Vec::with_capacity(words.len() * 8);
    for v in words {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

/// `Ok(None)` on clean end of input.
fn read_word<R: Read>(rd: &mut R) -> Result<Option<u64>> {
    let mut buf = [0u8; 8];
    let mut filled = 0;
    while filled < 8 {
        match rd.read(&mut buf[filled..]) {
            Ok(0) if filled == 0 => return Ok(None),
            Ok(0) => return Err(Error::Wire("truncated word".into())),
            Ok(n) => filled += n,
            Err(e) if e.kind() == ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Some(u64::from_le_bytes(buf)))
}

fn require_word<R: Read>(rd: &mut R) -> Result<u64> {
    read_word(rd)?.ok_or_else(|| Error::Wire("truncated record".into()))
}

fn read_element<R: Read>(rd: &mut R, q: FieldOrder) -> Result<u64> {
    let v = require_word(rd)?;
    if v >= q.q() {
        return Err(Error::Wire(format!(
            "{v} is not a canonical element of {q}"
        )));
    }
    Ok(v)
}

fn read_matrix<R: Read>(
    rd: &mut R,
    (rows, cols): (usize, usize),
    q: FieldOrder,
) -> Result<FieldMatrix> {
    let data = (0..rows * cols)
        .map(|_| read_element(rd, q))
        .collect::<Result<Vec<_>>>()?;
    FieldMatrix::from_vec(rows, cols, data, q)
}

fn write_matrix<W: Write>(w: &mut W, m: &FieldMatrix, shape: (usize, usize)) -> Result<()> {
    if m.shape() != shape {
        return Err(Error::DimensionMismatch(format!(
            "record matrix is {:?}, header implies {shape:?}",
            m.shape()
        )));
    }
    write_words(w, m.as_slice())
}

pub fn write_shares<W: Write>(w: &mut W, header: &Header, shares: &[WorkerShare]) -> Result<()> {
    header.write(SHARE_MAGIC, w)?;
    for share in shares {
        if share.shares_b.len() != header.params.m {
            return Err(Error::DimensionMismatch(format!(
                "worker {} holds {} B shares, expected m = {}",
                share.worker_id,
                share.shares_b.len(),
                header.params.m
            )));
        }
        write_words(w, &[share.worker_id as u64, share.point.x, share.point.y])?;
        write_matrix(w, &share.share_a, header.a_block())?;
        for b in &share.shares_b {
            write_matrix(w, b, header.b_block())?;
        }
    }
    Ok(())
}

pub fn read_shares<R: Read>(rd: &mut R) -> Result<(Header, Vec<WorkerShare>)> {
    let header = Header::read(SHARE_MAGIC, rd)?;
    let q = header.params.q;
    let mut shares = Vec::new();
    while let Some(id) = read_word(rd)? {
        let point = EvalPoint::new(read_element(rd, q)?, read_element(rd, q)?);
        let share_a = read_matrix(rd, header.a_block(), q)?;
        let shares_b = (0..header.params.m)
            .map(|_| read_matrix(rd, header.b_block(), q))
            .collect::<Result<Vec<_>>>()?;
        shares.push(WorkerShare {
            worker_id: id as usize,
            point,
            share_a,
            shares_b,
        });
    }
    Ok((header, shares))
}

pub fn write_results<W: Write>(
    w: &mut W,
    header: &Header,
    results: &[PartialResult],
) -> Result<()> {
    header.write(RESULT_MAGIC, w)?;
    for r in results {
        write_words(
            w,
            &[r.worker_id as u64, r.order as u64, r.point.x, r.point.y],
        )?;
        write_matrix(w, &r.product, header.product_block())?;
    }
    Ok(())
}

pub fn read_results<R: Read>(rd: &mut R) -> Result<(Header, Vec<PartialResult>)> {
    let header = Header::read(RESULT_MAGIC, rd)?;
    let q = header.params.q;
    let mut results = Vec::new();
    while let Some(id) = read_word(rd)? {
        let order = require_word(rd)? as usize;
        let point = EvalPoint::new(read_element(rd, q)?, read_element(rd, q)?);
        let product = read_matrix(rd, header.product_block(), q)?;
        results.push(PartialResult {
            worker_id: id as usize,
            order,
            point,
            product,
        });
    }
    Ok((header, results))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{encode, worker_compute};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample(seed: u64) -> (Header, Vec<WorkerShare>, Vec<PartialResult>) {
        let p = SchemeParams::new(2, 3, 1, 2, 4, 2147483647).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = FieldMatrix::random(4, 5, p.q, &mut rng);
        let b = FieldMatrix::random(5, 6, p.q, &mut rng);
        let enc = encode(&a, &b, &p, &mut rng).unwrap();
        let results = enc
            .shares
            .iter()
            .map(|s| worker_compute(s, 0, p.q).unwrap())
            .collect();
        (Header::new(p, 4, 5, 6).unwrap(), enc.shares, results)
    }

    #[test]
    fn header_layout_is_fixed() {
        let (header, _, results) = sample(0);
        let mut buf = Vec::new();
        write_results(&mut buf, &header, &results[..1]).unwrap();
        assert_eq!(&buf[..8], b"BPCRSULT");
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 1);
        assert_eq!(
            u64::from_le_bytes(buf[16..24].try_into().unwrap()),
            2147483647
        );
        let ints: Vec<u64> = buf[24..88]
            .chunks(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        assert_eq!(ints, vec![2, 3, 1, 2, 4, 4, 5, 6]);
        // header + id, order, x, y + a 2x2 product
        assert_eq!(buf.len(), 8 * (11 + 4 + 4));
    }

    #[test]
    fn rejects_bad_frames() {
        let (header, shares, results) = sample(1);
        let mut buf = Vec::new();
        write_shares(&mut buf, &header, &shares).unwrap();
        assert!(read_results(&mut buf.as_slice()).is_err());
        let truncated = &buf[..buf.len() - 3];
        assert!(matches!(
            read_shares(&mut &truncated[..]),
            Err(Error::Wire(_))
        ));

        let mut noncanonical = Vec::new();
        write_results(&mut noncanonical, &header, &results[..1]).unwrap();
        let at = 8 * 15;
        noncanonical[at..at + 8].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(matches!(
            read_results(&mut noncanonical.as_slice()),
            Err(Error::Wire(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn roundtrip(seed in any::<u64>()) {
            let (header, shares, results) = sample(seed);
            let mut buf = Vec::new();
            write_shares(&mut buf, &header, &shares).unwrap();
            let (h2, s2) = read_shares(&mut buf.as_slice()).unwrap();
            prop_assert_eq!(h2, header);
            prop_assert_eq!(s2, shares);

            let mut buf = Vec::new();
            write_results(&mut buf, &header, &results).unwrap();
            let (_, r2) = read_results(&mut buf.as_slice()).unwrap();
            prop_assert_eq!(r2, results);
        }
    }
}
