//! Level-4 matrix container reader and writer.
//!
//! Each matrix is a 20-byte header of five little-endian 32-bit integers
//! (type, rows, cols, imaginary flag, name length), the NUL-terminated name,
//! then the real part in column-major order. The type code is decimal
//! `MOPT`: M = 0 (little-endian), O = 0, P = element type, T = 0 (full
//! numeric matrix).

use thiserror::Error;

use crate::signal::RawSignal;

pub const HEADER_LEN: usize = 20;
/// Hard ceiling on a single matrix payload.
pub const MAX_PAYLOAD_BYTES: usize = 64 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContainerError {
    #[error("truncated header: need {HEADER_LEN} bytes at offset {offset}, {available} available")]
    TruncatedHeader { offset: usize, available: usize },
    #[error("truncated name: need {needed} bytes, {available} available")]
    TruncatedName { needed: usize, available: usize },
    #[error("truncated payload: need {needed} bytes, {available} available")]
    TruncatedPayload { needed: usize, available: usize },
    #[error("unsupported type code {0}")]
    UnsupportedType(i32),
    #[error("imaginary part present (flag {0}); only real matrices are supported")]
    ImaginaryData(i32),
    #[error("invalid dimensions {rows}x{cols}")]
    InvalidDimensions { rows: i32, cols: i32 },
    #[error("matrix name length {0} is invalid")]
    InvalidNameLength(i32),
    #[error("matrix name is not valid UTF-8")]
    InvalidName,
    #[error("payload of {bytes} bytes exceeds the {MAX_PAYLOAD_BYTES}-byte ceiling")]
    OversizedPayload { bytes: u128 },
    #[error("container holds no matrices")]
    Empty,
    #[error("no matrix named {0:?}")]
    MissingMatrix(String),
}

/// Element precision, the `P` digit of the type code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementType {
    Double,
    Single,
    Int32,
    Int16,
    UInt16,
    UInt8,
}

impl ElementType {
    pub fn from_digit(p: i32) -> Option<Self> {
        Some(match p {
            0 => ElementType::Double,
            1 => ElementType::Single,
            2 => ElementType::Int32,
            3 => ElementType::Int16,
            4 => ElementType::UInt16,
            5 => ElementType::UInt8,
            _ => return None,
        })
    }

    pub fn digit(self) -> i32 {
        match self {
            ElementType::Double => 0,
            ElementType::Single => 1,
            ElementType::Int32 => 2,
            ElementType::Int16 => 3,
            ElementType::UInt16 => 4,
            ElementType::UInt8 => 5,
        }
    }

    pub fn size(self) -> usize {
        match self {
            ElementType::Double => 8,
            ElementType::Single | ElementType::Int32 => 4,
            ElementType::Int16 | ElementType::UInt16 => 2,
            ElementType::UInt8 => 1,
        }
    }

    /// Full type code for a little-endian numeric matrix.
    pub fn type_code(self) -> i32 {
        self.digit() * 10
    }
}

/// Column-major matrix values in their stored precision.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixValues {
    Double(Vec<f64>),
    Single(Vec<f32>),
    Int32(Vec<i32>),
    Int16(Vec<i16>),
    UInt16(Vec<u16>),
    UInt8(Vec<u8>),
}

impl MatrixValues {
    pub fn element_type(&self) -> ElementType {
        match self {
            MatrixValues::Double(_) => ElementType::Double,
            MatrixValues::Single(_) => ElementType::Single,
            MatrixValues::Int32(_) => ElementType::Int32,
            MatrixValues::Int16(_) => ElementType::Int16,
            MatrixValues::UInt16(_) => ElementType::UInt16,
            MatrixValues::UInt8(_) => ElementType::UInt8,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            MatrixValues::Double(v) => v.len(),
            MatrixValues::Single(v) => v.len(),
            MatrixValues::Int32(v) => v.len(),
            MatrixValues::Int16(v) => v.len(),
            MatrixValues::UInt16(v) => v.len(),
            MatrixValues::UInt8(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, index: usize) -> Option<f64> {
        match self {
            MatrixValues::Double(v) => v.get(index).copied(),
            MatrixValues::Single(v) => v.get(index).map(|&x| f64::from(x)),
            MatrixValues::Int32(v) => v.get(index).map(|&x| f64::from(x)),
            MatrixValues::Int16(v) => v.get(index).map(|&x| f64::from(x)),
            MatrixValues::UInt16(v) => v.get(index).map(|&x| f64::from(x)),
            MatrixValues::UInt8(v) => v.get(index).map(|&x| f64::from(x)),
        }
    }

    fn decode(ty: ElementType, payload: &[u8]) -> MatrixValues {
        macro_rules! read {
            ($t:ty, $variant:ident) => {
                MatrixValues::$variant(
                    payload
                        .chunks_exact(std::mem::size_of::<$t>())
                        .map(|c| <$t>::from_le_bytes(c.try_into().expect("chunk size")))
                        .collect(),
                )
            };
        }
        match ty {
            ElementType::Double => read!(f64, Double),
            ElementType::Single => read!(f32, Single),
            ElementType::Int32 => read!(i32, Int32),
            ElementType::Int16 => read!(i16, Int16),
            ElementType::UInt16 => read!(u16, UInt16),
            ElementType::UInt8 => MatrixValues::UInt8(payload.to_vec()),
        }
    }

    fn encode(&self, out: &mut Vec<u8>) {
        match self {
            MatrixValues::Double(v) => v.iter().for_each(|x| out.extend(x.to_le_bytes())),
            MatrixValues::Single(v) => v.iter().for_each(|x| out.extend(x.to_le_bytes())),
            MatrixValues::Int32(v) => v.iter().for_each(|x| out.extend(x.to_le_bytes())),
            MatrixValues::Int16(v) => v.iter().for_each(|x| out.extend(x.to_le_bytes())),
            MatrixValues::UInt16(v) => v.iter().for_each(|x| out.extend(x.to_le_bytes())),
            MatrixValues::UInt8(v) => out.extend_from_slice(v),
        }
    }
}

/// A named real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub values: MatrixValues,
}

impl Matrix {
    /// Panics if `values` does not hold `rows * cols` elements.
    pub fn new(name: impl Into<String>, rows: usize, cols: usize, values: MatrixValues) -> Self {
        assert_eq!(values.len(), rows * cols, "matrix shape mismatch");
        Self {
            name: name.into(),
            rows,
            cols,
            values,
        }
    }

    pub fn element_type(&self) -> ElementType {
        self.values.element_type()
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        if row >= self.rows || col >= self.cols {
            return None;
        }
        self.values.get(col * self.rows + row)
    }

    pub fn row(&self, row: usize) -> Vec<f64> {
        (0..self.cols).filter_map(|c| self.get(row, c)).collect()
    }

    /// Rows become leads, columns become samples.
    pub fn to_raw_signal(&self, sample_rate_hz: f64) -> RawSignal {
        RawSignal {
            sample_rate_hz,
            leads: (0..self.rows).map(|r| self.row(r)).collect(),
        }
    }

    /// Single-precision matrix holding one lead per row.
    pub fn from_leads(name: impl Into<String>, leads: &[Vec<f32>]) -> Self {
        let rows = leads.len();
        let cols = leads.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows * cols);
        for c in 0..cols {
            for lead in leads {
                values.push(lead[c]);
            }
        }
        Self::new(name, rows, cols, MatrixValues::Single(values))
    }
}

fn read_i32(bytes: &[u8], offset: usize) -> i32 {
    i32::from_le_bytes(bytes[offset..offset + 4].try_into().expect("4 bytes"))
}

/// Parses one matrix starting at `offset`; returns it with the offset just
/// past its payload.
fn parse_at(bytes: &[u8], offset: usize) -> Result<(Matrix, usize), ContainerError> {
    let available = bytes.len() - offset;
    if available < HEADER_LEN {
        return Err(ContainerError::TruncatedHeader { offset, available });
    }
    let ty = read_i32(bytes, offset);
    let rows = read_i32(bytes, offset + 4);
    let cols = read_i32(bytes, offset + 8);
    let imag = read_i32(bytes, offset + 12);
    let name_len = read_i32(bytes, offset + 16);

    if !(0..10_000).contains(&ty) {
        return Err(ContainerError::UnsupportedType(ty));
    }
    let (m, o, p, t) = (ty / 1000, (ty / 100) % 10, (ty / 10) % 10, ty % 10);
    let element = match ElementType::from_digit(p) {
        Some(e) if m == 0 && o == 0 && t == 0 => e,
        _ => return Err(ContainerError::UnsupportedType(ty)),
    };
    if imag != 0 {
        return Err(ContainerError::ImaginaryData(imag));
    }
    if rows < 0 || cols < 0 {
        return Err(ContainerError::InvalidDimensions { rows, cols });
    }
    if name_len < 1 {
        return Err(ContainerError::InvalidNameLength(name_len));
    }

    let mut cursor = offset + HEADER_LEN;
    let name_len = name_len as usize;
    let remaining = bytes.len() - cursor;
    if name_len > remaining {
        return Err(ContainerError::TruncatedName {
            needed: name_len,
            available: remaining,
        });
    }
    let raw_name = &bytes[cursor..cursor + name_len];
    let trimmed = raw_name
        .iter()
        .position(|&b| b == 0)
        .map_or(raw_name, |end| &raw_name[..end]);
    let name = std::str::from_utf8(trimmed)
        .map_err(|_| ContainerError::InvalidName)?
        .to_string();
    cursor += name_len;

    let bytes_needed = rows as u128 * cols as u128 * element.size() as u128;
    if bytes_needed > MAX_PAYLOAD_BYTES as u128 {
        return Err(ContainerError::OversizedPayload {
            bytes: bytes_needed,
        });
    }
    let bytes_needed = bytes_needed as usize;
    let remaining = bytes.len() - cursor;
    if bytes_needed > remaining {
        return Err(ContainerError::TruncatedPayload {
            needed: bytes_needed,
            available: remaining,
        });
    }
    let values = MatrixValues::decode(element, &bytes[cursor..cursor + bytes_needed]);
    cursor += bytes_needed;
    Ok((
        Matrix {
            name,
            rows: rows as usize,
            cols: cols as usize,
            values,
        },
        cursor,
    ))
}

/// Parses the first matrix in a container; trailing bytes are ignored.
pub fn parse_matrix_container(bytes: &[u8]) -> Result<Matrix, ContainerError> {
    if bytes.is_empty() {
        return Err(ContainerError::Empty);
    }
    parse_at(bytes, 0).map(|(m, _)| m)
}

/// Parses every matrix in a container.
pub fn parse_matrices(bytes: &[u8]) -> Result<Vec<Matrix>, ContainerError> {
    if bytes.is_empty() {
        return Err(ContainerError::Empty);
    }
    let mut out = Vec::new();
    let mut offset = 0;
    while offset < bytes.len() {
        let (m, next) = parse_at(bytes, offset)?;
        out.push(m);
        offset = next;
    }
    Ok(out)
}

/// The matrix called `name`, or the first matrix when `name` is `None`.
pub fn find_matrix(bytes: &[u8], name: Option<&str>) -> Result<Matrix, ContainerError> {
    match name {
        None => parse_matrix_container(bytes),
        Some(wanted) => parse_matrices(bytes)?
            .into_iter()
            .find(|m| m.name == wanted)
            .ok_or_else(|| ContainerError::MissingMatrix(wanted.to_string())),
    }
}

/// Serializes one matrix.
pub fn write_matrix(matrix: &Matrix) -> Vec<u8> {
    let name = matrix.name.as_bytes();
    let mut out = Vec::with_capacity(
        HEADER_LEN + name.len() + 1 + matrix.values.len() * matrix.element_type().size(),
    );
    for field in [
        matrix.element_type().type_code(),
        matrix.rows as i32,
        matrix.cols as i32,
        0,
        name.len() as i32 + 1,
    ] {
        out.extend(field.to_le_bytes());
    }
    out.extend_from_slice(name);
    out.push(0);
    matrix.values.encode(&mut out);
    out
}
