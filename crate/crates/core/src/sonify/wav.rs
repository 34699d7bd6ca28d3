//! 16-bit PCM stereo WAV output (and a reader for round-trip checks).
//!
//! Canonical 44-byte RIFF/WAVE header followed by interleaved L,R frames of
//! signed 16-bit little-endian samples. Quantization rounds ties away from
//! zero and clips symmetrically: ±1.0 encode as ±32767.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{SonifyError, StereoBuffer};

const HEADER_LEN: usize = 44;
const CHANNELS: u16 = 2;
const BITS_PER_SAMPLE: u16 = 16;

/// Symmetric 16-bit quantization of a sample in [−1, 1].
pub fn quantize(x: f64) -> i16 {
    let scaled = (x * 32767.0).round();
    scaled.clamp(-32767.0, 32767.0) as i16
}

/// The exact 44-byte header for `n_frames` stereo frames.
pub fn wav_header(sample_rate: u32, n_frames: u32) -> [u8; HEADER_LEN] {
    let block_align = CHANNELS * (BITS_PER_SAMPLE / 8);
    let byte_rate = sample_rate * block_align as u32;
    let data_len = n_frames * block_align as u32;

    let mut h = [0u8; HEADER_LEN];
    h[0..4].copy_from_slice(b"RIFF");
    h[4..8].copy_from_slice(&(36 + data_len).to_le_bytes());
    h[8..12].copy_from_slice(b"WAVE");
    h[12..16].copy_from_slice(b"fmt ");
    h[16..20].copy_from_slice(&16u32.to_le_bytes()); // PCM fmt chunk size
    h[20..22].copy_from_slice(&1u16.to_le_bytes()); // PCM
    h[22..24].copy_from_slice(&CHANNELS.to_le_bytes());
    h[24..28].copy_from_slice(&sample_rate.to_le_bytes());
    h[28..32].copy_from_slice(&byte_rate.to_le_bytes());
    h[32..34].copy_from_slice(&block_align.to_le_bytes());
    h[34..36].copy_from_slice(&BITS_PER_SAMPLE.to_le_bytes());
    h[36..40].copy_from_slice(b"data");
    h[40..44].copy_from_slice(&data_len.to_le_bytes());
    h
}

/// Writes the buffer as PCM16 stereo. Refuses to clobber an existing file
/// unless `overwrite` is set.
pub fn write_wav(buf: &StereoBuffer, path: &Path, overwrite: bool) -> Result<(), SonifyError> {
    if path.exists() && !overwrite {
        return Err(SonifyError::PathExists(path.to_path_buf()));
    }
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(&wav_header(buf.sample_rate(), buf.len() as u32))?;
    for (l, r) in buf.left().iter().zip(buf.right()) {
        out.write_all(&quantize(*l).to_le_bytes())?;
        out.write_all(&quantize(*r).to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Reads back a file produced by [`write_wav`]. Only the canonical layout is
/// accepted; samples decode to i/32767.
pub fn read_wav(path: &Path) -> Result<StereoBuffer, SonifyError> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut header = [0u8; HEADER_LEN];
    reader.read_exact(&mut header)?;

    let tag = |range: std::ops::Range<usize>, expect: &[u8], what: &str| -> Result<(), SonifyError> {
        if &header[range] != expect {
            return Err(SonifyError::BadWav(format!("missing {what} tag")));
        }
        Ok(())
    };
    tag(0..4, b"RIFF", "RIFF")?;
    tag(8..12, b"WAVE", "WAVE")?;
    tag(12..16, b"fmt ", "fmt")?;
    tag(36..40, b"data", "data")?;

    let u16_at = |i: usize| u16::from_le_bytes([header[i], header[i + 1]]);
    let u32_at = |i: usize| u32::from_le_bytes([header[i], header[i + 1], header[i + 2], header[i + 3]]);
    if u16_at(20) != 1 {
        return Err(SonifyError::BadWav("not PCM".into()));
    }
    if u16_at(22) != CHANNELS {
        return Err(SonifyError::BadWav(format!("expected {CHANNELS} channels, got {}", u16_at(22))));
    }
    if u16_at(34) != BITS_PER_SAMPLE {
        return Err(SonifyError::BadWav(format!("expected 16-bit samples, got {}", u16_at(34))));
    }
    let sample_rate = u32_at(24);
    let data_len = u32_at(40) as usize;
    if data_len % 4 != 0 {
        return Err(SonifyError::BadWav("data length is not whole stereo frames".into()));
    }

    let mut data = vec![0u8; data_len];
    reader.read_exact(&mut data)?;
    let n = data_len / 4;
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for frame in data.chunks_exact(4) {
        let l = i16::from_le_bytes([frame[0], frame[1]]);
        let r = i16::from_le_bytes([frame[2], frame[3]]);
        left.push(l as f64 / 32767.0);
        right.push(r as f64 / 32767.0);
    }
    StereoBuffer::new(sample_rate, left, right)
}
