//! Image file I/O: binary PGM (P5) / PPM (P6) for viewing, plus a lossless
//! native container for exact pipeline round-trips.
//!
//! Native container layout: magic `CTF1`, then height, width, channels as
//! little-endian u32, then height*width*channels little-endian f64 samples
//! in planar row-major order.
//!
//! 8-bit formats map bytes to [0,1] by /255 on read; writes clamp to [0,1]
//! and round half up.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::num::Scalar;

const NATIVE_MAGIC: &[u8; 4] = b"CTF1";

fn format_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Format { offset, message: message.into() }
}

/// Reads PGM (P5), PPM (P6), or the native container, sniffing the magic.
pub fn read_image<T: Scalar>(path: &Path) -> Result<Image<T>> {
    let bytes = fs::read(path)?;
    match bytes.get(..2) {
        Some(b"P5") => decode_netpbm(&bytes, 1),
        Some(b"P6") => decode_netpbm(&bytes, 3),
        _ if bytes.get(..4) == Some(NATIVE_MAGIC.as_slice()) => decode_native(&bytes),
        _ => Err(format_err(0, "unrecognized magic (want P5, P6, or CTF1)")),
    }
}

/// Writes by extension: `.pgm` (grayscale P5), `.ppm` (3-channel P6),
/// anything else the native container.
pub fn write_image<T: Scalar>(img: &Image<T>, path: &Path) -> Result<()> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let bytes = match ext {
        "pgm" => encode_netpbm(img, 1)?,
        "ppm" => encode_netpbm(img, 3)?,
        _ => encode_native(img),
    };
    fs::write(path, bytes)?;
    Ok(())
}

fn quantize<T: Scalar>(v: T) -> u8 {
    let clamped = v.to_f64_lossy().clamp(0.0, 1.0);
    (clamped * 255.0 + 0.5).floor() as u8
}

fn encode_netpbm<T: Scalar>(img: &Image<T>, channels: usize) -> Result<Vec<u8>> {
    if img.channels() != channels {
        return Err(Error::ShapeMismatch(format!(
            "format needs {channels} channel(s), image has {}",
            img.channels()
        )));
    }
    let magic = if channels == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    // interleave planar channels for the pixel stream
    for i in 0..img.height() {
        for j in 0..img.width() {
            for c in 0..channels {
                out.push(quantize(img.get(i, j, c)));
            }
        }
    }
    Ok(out)
}

fn decode_netpbm<T: Scalar>(bytes: &[u8], channels: usize) -> Result<Image<T>> {
    let mut pos = 2usize; // past magic
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // skip whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while let Some(&b) = bytes.get(pos) {
                        pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(|b| b.is_ascii_digit()) {
            pos += 1;
        }
        if pos == start {
            return Err(format_err(pos, "expected decimal header field"));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).unwrap();
        *field = text.parse().map_err(|_| format_err(start, "bad header number"))?;
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(format_err(pos, format!("only maxval 255 supported, got {maxval}")));
    }
    // single whitespace byte after maxval
    if !bytes.get(pos).is_some_and(|b| b.is_ascii_whitespace()) {
        return Err(format_err(pos, "expected whitespace after maxval"));
    }
    pos += 1;
    let n = width * height * channels;
    let pixels = bytes
        .get(pos..pos + n)
        .ok_or_else(|| format_err(pos, format!("truncated pixel data, need {n} bytes")))?;
    let mut data = vec![T::zero(); n];
    let hw = height * width;
    for (k, &b) in pixels.iter().enumerate() {
        let (pix, c) = (k / channels, k % channels);
        data[c * hw + pix] = T::from_f64_lossy(b as f64 / 255.0);
    }
    Image::new(height, width, channels, data)
}

fn encode_native<T: Scalar>(img: &Image<T>) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + img.data().len() * 8);
    out.extend_from_slice(NATIVE_MAGIC);
    for dim in [img.height(), img.width(), img.channels()] {
        out.extend_from_slice(&(dim as u32).to_le_bytes());
    }
    for &v in img.data() {
        out.extend_from_slice(&v.to_f64_lossy().to_le_bytes());
    }
    out
}

fn decode_native<T: Scalar>(bytes: &[u8]) -> Result<Image<T>> {
    if bytes.len() < 16 {
        return Err(format_err(bytes.len(), "truncated native header"));
    }
    let dim = |i: usize| {
        u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap()) as usize
    };
    let (h, w, c) = (dim(0), dim(1), dim(2));
    let n = h * w * c;
    if bytes.len() != 16 + n * 8 {
        return Err(format_err(
            bytes.len(),
            format!("native payload length {} != expected {}", bytes.len() - 16, n * 8),
        ));
    }
    let data: Vec<T> = bytes[16..]
        .chunks_exact(8)
        .map(|ch| T::from_f64_lossy(f64::from_le_bytes(ch.try_into().unwrap())))
        .collect();
    Image::new(h, w, c, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use tempfile::tempdir;

    #[test]
    fn native_roundtrip_is_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let img =
            Image::new(7, 5, 3, (0..105).map(|_| rng.gen::<f64>() * 3.0 - 1.0).collect()).unwrap();
        let dir = tempdir().unwrap();
        let path = dir.path().join("x.ctf");
        write_image(&img, &path).unwrap();
        let back: Image<f64> = read_image(&path).unwrap();
        assert_eq!(img, back);
    }

    #[test]
    fn parses_minimal_p5() {
        let bytes = b"P5\n2 2\n255\n\x00\x40\x80\xff";
        let img: Image<f64> = decode_netpbm(bytes, 1).unwrap();
        assert_eq!(img.shape(), (2, 2, 1));
        assert_eq!(img.get(0, 1, 0), 64.0 / 255.0);
        assert_eq!(img.get(1, 1, 0), 1.0);
    }

    #[test]
    fn quantization_rule() {
        // 0.5 rounds half up to byte 128
        assert_eq!(quantize(0.5f64), 128);
        assert_eq!(quantize(-0.3f64), 0);
        assert_eq!(quantize(1.7f64), 255);
        let img = Image::new(1, 1, 1, vec![0.5]).unwrap();
        let dir = tempdir().unwrap();
        let path = dir.path().join("x.pgm");
        write_image(&img, &path).unwrap();
        let back: Image<f64> = read_image(&path).unwrap();
        assert_eq!(back.get(0, 0, 0), 128.0 / 255.0);
    }

    #[test]
    fn pgm_roundtrip_within_quantization() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let img = Image::new(4, 6, 1, (0..24).map(|_| rng.gen::<f64>()).collect()).unwrap();
        let dir = tempdir().unwrap();
        let path = dir.path().join("x.pgm");
        write_image(&img, &path).unwrap();
        let back: Image<f64> = read_image(&path).unwrap();
        assert_eq!(back.shape(), img.shape());
        for (a, b) in img.data().iter().zip(back.data()) {
            assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
        }
    }

    #[test]
    fn ppm_roundtrip_and_channel_mismatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let img = Image::new(3, 3, 3, (0..27).map(|_| rng.gen::<f64>()).collect()).unwrap();
        let dir = tempdir().unwrap();
        let path = dir.path().join("x.ppm");
        write_image(&img, &path).unwrap();
        let back: Image<f64> = read_image(&path).unwrap();
        assert_eq!(back.shape(), img.shape());
        assert!(write_image(&img, &dir.path().join("bad.pgm")).is_err());
    }

    #[test]
    fn format_errors_carry_offsets() {
        let err = decode_netpbm::<f64>(b"P5\n2 2\n64\n\x00\x00\x00\x00", 1).unwrap_err();
        assert!(matches!(err, Error::Format { .. }));
        let err = decode_netpbm::<f64>(b"P5\n2 2\n255\n\x00", 1).unwrap_err();
        let Error::Format { offset, .. } = err else { panic!() };
        assert_eq!(offset, 11);
    }
}
