//! Binary PPM (P6) encoding of snapshots.
//!
//! The step is stored in a header comment (`# step <n>`).

use std::io::{self, Write};
use std::path::Path;

use super::render::SnapshotBitmap;
use super::MetricsError;

pub fn encode_ppm(bmp: &SnapshotBitmap) -> Vec<u8> {
    let header = format!("P6\n# step {}\n{} {}\n255\n", bmp.step, bmp.width, bmp.height);
    let mut out = Vec::with_capacity(header.len() + bmp.pixels.len() * 3);
    out.extend_from_slice(header.as_bytes());
    for px in &bmp.pixels {
        out.extend_from_slice(px);
    }
    out
}

pub fn write_ppm(bmp: &SnapshotBitmap, path: &Path) -> io::Result<()> {
    let mut f = io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(&encode_ppm(bmp))?;
    f.flush()
}

/// File name used for the snapshot of a given step.
pub fn snapshot_file_name(step: u64) -> String {
    format!("snap_{step}.ppm")
}

/// Parses a P6 image. The step comes from a `# step` comment when present,
/// otherwise `fallback_step`.
pub fn decode_ppm(bytes: &[u8], fallback_step: u64) -> Result<SnapshotBitmap, MetricsError> {
    let bad = |m: &str| MetricsError::Image(m.to_string());
    let mut pos = 0usize;
    let mut step = fallback_step;
    let mut tokens: Vec<String> = Vec::with_capacity(4);
    while tokens.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos >= bytes.len() {
            return Err(bad("truncated header"));
        }
        if bytes[pos] == b'#' {
            let end = bytes[pos..].iter().position(|&b| b == b'\n').map_or(bytes.len(), |e| pos + e);
            let comment = String::from_utf8_lossy(&bytes[pos + 1..end]);
            if let Some(s) = comment.trim().strip_prefix("step ") {
                step = s.trim().parse().map_err(|_| bad("bad step comment"))?;
            }
            pos = end;
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if tokens[0] != "P6" {
        return Err(bad("not a binary PPM (P6)"));
    }
    let width: u32 = tokens[1].parse().map_err(|_| bad("bad width"))?;
    let height: u32 = tokens[2].parse().map_err(|_| bad("bad height"))?;
    if tokens[3] != "255" {
        return Err(bad("only 8-bit PPM supported"));
    }
    pos += 1; // single whitespace after maxval
    let n = (width as usize) * (height as usize);
    let data = bytes.get(pos..pos + 3 * n).ok_or_else(|| bad("truncated pixel data"))?;
    let pixels = data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    Ok(SnapshotBitmap {
        width,
        height,
        step,
        pixels,
    })
}
