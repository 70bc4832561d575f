//! Model file container, format version 1. All integers and floats are
//! little-endian.
//!
//! ```text
//! magic        8 bytes   "EMOTWMDL"
//! version      u16       1
//! head kind    u8        0 = single, 1 = multi
//! classes      u8        8
//! backend      u16 len + UTF-8, e.g. "reference:18"
//! width        u64       feature width
//! seed         u64
//! epochs       u32
//! threshold    f64
//! final loss   f64
//! bias         8 x f64
//! columns      u64       number of stored weight columns
//!   column     u64 index, then 8 x f64 (one per emotion)
//! ```
//!
//! Only columns holding a non-zero weight are stored, in ascending order.
//! Weights are widened to `f64`, so `f32` and `f64` models both reload
//! bit-exact.

use std::io::{Read, Write};
use std::sync::Arc;

use crate::classify::backend::{BackendSpec, EncoderBackend, ReferenceBackend};
use crate::classify::head::{HeadKind, LinearHead};
use crate::classify::TrainedModel;
use crate::corpus::NUM_EMOTIONS;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MAGIC: &[u8; 8] = b"EMOTWMDL";
pub const FORMAT_VERSION: u16 = 1;

pub fn write_model<T: Scalar, W: Write>(model: &TrainedModel<T>, mut out: W) -> Result<()> {
    let head = model.head();
    out.write_all(MAGIC)?;
    out.write_all(&FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&[match head.kind() {
        HeadKind::Single => 0,
        HeadKind::Multi => 1,
    }])?;
    out.write_all(&[NUM_EMOTIONS as u8])?;
    let backend = model.backend().spec().to_string();
    let len = u16::try_from(backend.len())
        .map_err(|_| Error::ModelFormat("backend descriptor too long".into()))?;
    out.write_all(&len.to_le_bytes())?;
    out.write_all(backend.as_bytes())?;
    out.write_all(&(head.width() as u64).to_le_bytes())?;
    out.write_all(&model.seed().to_le_bytes())?;
    out.write_all(&(model.epochs() as u32).to_le_bytes())?;
    out.write_all(&model.threshold().to_le_bytes())?;
    out.write_all(&model.final_loss().to_le_bytes())?;
    for b in head.bias() {
        out.write_all(&b.as_f64().to_le_bytes())?;
    }
    let columns = head.nonzero_columns();
    out.write_all(&(columns.len() as u64).to_le_bytes())?;
    for j in columns {
        out.write_all(&(j as u64).to_le_bytes())?;
        for c in 0..NUM_EMOTIONS {
            out.write_all(&head.get(c, j).as_f64().to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads a model whose backend is the built-in reference encoder.
pub fn read_model<T: Scalar, R: Read>(input: R) -> Result<TrainedModel<T>> {
    read_model_with(input, |spec| match spec {
        BackendSpec::Reference { width_exponent } => {
            Ok(Arc::new(ReferenceBackend::new(*width_exponent)?) as Arc<dyn EncoderBackend<T>>)
        }
        other => Err(Error::BackendUnavailable(format!(
            "model was trained with `{other}`; load it with a resolver that provides this backend"
        ))),
    })
}

/// Reads a model, constructing its encoder through `resolve`.
pub fn read_model_with<T: Scalar, R: Read>(
    mut input: R,
    resolve: impl FnOnce(&BackendSpec) -> Result<Arc<dyn EncoderBackend<T>>>,
) -> Result<TrainedModel<T>> {
    let mut magic = [0u8; 8];
    read_exact(&mut input, &mut magic)?;
    if &magic != MAGIC {
        return Err(Error::ModelFormat("not a model file (bad magic)".into()));
    }
    let version = u16::from_le_bytes(read_array(&mut input)?);
    if version != FORMAT_VERSION {
        return Err(Error::ModelFormat(format!(
            "unsupported format version {version}"
        )));
    }
    let [kind, classes] = read_array::<2, _>(&mut input)?;
    let kind = match kind {
        0 => HeadKind::Single,
        1 => HeadKind::Multi,
        k => return Err(Error::ModelFormat(format!("unknown head kind {k}"))),
    };
    if classes as usize != NUM_EMOTIONS {
        return Err(Error::ModelFormat(format!(
            "expected {NUM_EMOTIONS} classes, found {classes}"
        )));
    }
    let len = u16::from_le_bytes(read_array(&mut input)?) as usize;
    let mut backend = vec![0u8; len];
    read_exact(&mut input, &mut backend)?;
    let spec: BackendSpec = String::from_utf8(backend)
        .map_err(|_| Error::ModelFormat("backend descriptor is not UTF-8".into()))?
        .parse()?;
    let width = u64::from_le_bytes(read_array(&mut input)?) as usize;
    let seed = u64::from_le_bytes(read_array(&mut input)?);
    let epochs = u32::from_le_bytes(read_array(&mut input)?) as usize;
    let threshold = f64::from_le_bytes(read_array(&mut input)?);
    let final_loss = f64::from_le_bytes(read_array(&mut input)?);

    let backend = resolve(&spec)?;
    if backend.width() != width {
        return Err(Error::ModelFormat(format!(
            "stored width {width} does not match backend `{spec}`"
        )));
    }
    let mut head = LinearHead::zeros(kind, width);
    for b in head.bias_mut().iter_mut() {
        *b = T::lit(f64::from_le_bytes(read_array(&mut input)?));
    }
    let columns = u64::from_le_bytes(read_array(&mut input)?);
    let mut previous = None;
    for _ in 0..columns {
        let j = u64::from_le_bytes(read_array(&mut input)?) as usize;
        if j >= width || previous.is_some_and(|p| p >= j) {
            return Err(Error::ModelFormat(format!("bad column index {j}")));
        }
        previous = Some(j);
        for c in 0..NUM_EMOTIONS {
            head.set(c, j, T::lit(f64::from_le_bytes(read_array(&mut input)?)));
        }
    }
    let mut trailing = [0u8; 1];
    if input.read(&mut trailing)? != 0 {
        return Err(Error::ModelFormat("trailing bytes after weights".into()));
    }
    TrainedModel::from_parts(backend, head, threshold, seed, epochs, final_loss)
}

fn read_exact<R: Read>(input: &mut R, buf: &mut [u8]) -> Result<()> {
    input.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::ModelFormat("truncated model file".into()),
        _ => Error::Io(e),
    })
}

fn read_array<const N: usize, R: Read>(input: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    read_exact(input, &mut buf)?;
    Ok(buf)
}
