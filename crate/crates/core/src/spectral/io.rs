//! Plain-text serialisation of fields: a `# d=<d> lambda=<cutoff>` header
//! followed by one line per canonical mode, `k1 k2 [k3] reX imX reY imY [reZ imZ]`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex;

use super::field::{czero, SpectralField};
use super::modes::{ModeSet, WaveVector};
use crate::error::{Error, Result};
use crate::Scalar;

pub fn write_field<T: Scalar, W: Write>(u: &SpectralField<T>, mut w: W) -> Result<()> {
    let m = u.modes();
    let d = m.dim();
    let cutoff = m.cutoff().unwrap_or_else(|| m.max_norm_sq() as f64);
    writeln!(w, "# d={d} lambda={cutoff}")?;
    for (k, c) in m.modes().iter().zip(u.coeffs()) {
        let mut line = String::new();
        for i in 0..d {
            line.push_str(&format!("{} ", k.0[i]));
        }
        for (i, z) in c.iter().take(d).enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&format!("{:.16e} {:.16e}", z.re.as_f64(), z.im.as_f64()));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Reads a field. When the listed modes are exactly the ball given by the
/// header the field lives on that ball, otherwise on the listed set.
pub fn read_field<T: Scalar, R: Read>(r: R) -> Result<SpectralField<T>> {
    let mut lines = BufReader::new(r).lines().enumerate();
    let (dim, cutoff) = loop {
        let (no, line) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "missing header".into(),
        })?;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        break parse_header(&line).ok_or(Error::Parse {
            line: no + 1,
            msg: format!("bad header `{line}`"),
        })?;
    };
    let mut entries = Vec::new();
    for (no, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: no + 1, msg };
        let toks: Vec<&str> = t.split_whitespace().collect();
        if toks.len() != 3 * dim {
            return Err(err(format!("expected {} columns, found {}", 3 * dim, toks.len())));
        }
        let mut k = [0i32; 3];
        for i in 0..dim {
            k[i] = toks[i].parse().map_err(|_| err(format!("bad index `{}`", toks[i])))?;
        }
        let k = WaveVector(k);
        if k.is_zero() || k.norm_sq() as f64 > cutoff {
            return Err(err(format!("mode {k} outside |k|^2 <= {cutoff}")));
        }
        let mut c = czero::<T>();
        for i in 0..dim {
            let re: f64 = toks[dim + 2 * i]
                .parse()
                .map_err(|_| err(format!("bad number `{}`", toks[dim + 2 * i])))?;
            let im: f64 = toks[dim + 2 * i + 1]
                .parse()
                .map_err(|_| err(format!("bad number `{}`", toks[dim + 2 * i + 1])))?;
            c[i] = Complex::new(T::lit(re), T::lit(im));
        }
        entries.push((k, c));
    }
    let ball = ModeSet::ball(dim, cutoff)?;
    let mut listed: Vec<WaveVector> = entries.iter().map(|(k, _)| k.canonical().0).collect();
    listed.sort();
    listed.dedup();
    let modes = if listed.as_slice() == ball.modes() {
        ball
    } else {
        ModeSet::custom(dim, listed)?
    };
    let mut u = SpectralField::zeros(&modes);
    for (k, c) in entries {
        u.set(k, c)?;
    }
    Ok(u)
}

fn parse_header(line: &str) -> Option<(usize, f64)> {
    let rest = line.trim().strip_prefix('#')?;
    let mut dim = None;
    let mut cutoff = None;
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("d=") {
            dim = v.parse().ok();
        } else if let Some(v) = tok.strip_prefix("lambda=") {
            cutoff = v.parse().ok();
        }
    }
    Some((dim?, cutoff?))
}

pub fn save_field<T: Scalar>(u: &SpectralField<T>, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_field(u, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_field<T: Scalar>(path: &Path) -> Result<SpectralField<T>> {
    read_field(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_is_bit_exact() {
        for (d, cut) in [(2, 5.0), (3, 9.0)] {
            let m = ModeSet::ball(d, cut).unwrap();
            let u = SpectralField::<f64>::random_solenoidal(&m, &mut ChaCha8Rng::seed_from_u64(4));
            let mut buf = Vec::new();
            write_field(&u, &mut buf).unwrap();
            let v: SpectralField<f64> = read_field(buf.as_slice()).unwrap();
            assert_eq!(v.modes(), u.modes());
            assert_eq!(v.coeffs(), u.coeffs());
        }
    }

    #[test]
    fn custom_set_round_trip() {
        let m = ModeSet::custom(3, [WaveVector::new(3, 0, 0), WaveVector::new(0, 2, 0)]).unwrap();
        let u = SpectralField::<f64>::random_solenoidal(&m, &mut ChaCha8Rng::seed_from_u64(4));
        let mut buf = Vec::new();
        write_field(&u, &mut buf).unwrap();
        let v: SpectralField<f64> = read_field(buf.as_slice()).unwrap();
        assert_eq!(v.modes(), u.modes());
        assert_eq!(v.coeffs(), u.coeffs());
    }

    #[test]
    fn reports_bad_line() {
        let text = "# d=2 lambda=2\n1 0 0.5 0 0 0\n1 1 x 0 0 0\n";
        match read_field::<f64, _>(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let text = "# d=2 lambda=2\n3 0 0 0 0 0\n";
        assert!(read_field::<f64, _>(text.as_bytes()).is_err());
    }
}
