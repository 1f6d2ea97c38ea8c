//! CSV data files and JSON model files.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{PointSet, SplineModel, NORM_TOL};
use crate::kernel::KernelSpec;
use crate::trend::TrendBasis;

pub const MODEL_FORMAT: &str = "sphere-tps-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DataFormat {
    /// `d` coordinate columns, then the value.
    #[default]
    Cartesian,
    /// Longitude and latitude in degrees, then the value. `d = 3` only.
    LonLat,
}

impl std::str::FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cartesian" | "xyz" => Ok(Self::Cartesian),
            "lonlat" | "geo" | "geolonlat" => Ok(Self::LonLat),
            other => Err(Error::Parse(format!(
                "unknown data format {other:?} (cartesian, lonlat)"
            ))),
        }
    }
}

/// `(lon, lat)` in degrees to a unit vector in `R^3`.
pub fn lonlat_to_unit(lon: f64, lat: f64) -> [f64; 3] {
    let (lon, lat) = (lon.to_radians(), lat.to_radians());
    [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()]
}

/// Inverse of [`lonlat_to_unit`], longitude in `(-180, 180]`.
pub fn unit_to_lonlat(x: &[f64; 3]) -> (f64, f64) {
    let lon = x[1].atan2(x[0]).to_degrees();
    let lat = x[2].atan2(x[0].hypot(x[1])).to_degrees();
    (lon, lat)
}

/// Points with optional values, as read from a CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    pub d: usize,
    pub points: Vec<Vec<f64>>,
    pub values: Option<Vec<f64>>,
}

impl DataSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn parse_field(s: &str, line: u64, col: usize) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| {
        Error::Parse(format!(
            "line {line}, column {}: not a number: {s:?}",
            col + 1
        ))
    })?;
    if !v.is_finite() {
        return Err(Error::Parse(format!(
            "line {line}, column {}: value is not finite",
            col + 1
        )));
    }
    Ok(v)
}

/// Reads a header-led CSV of points.
///
/// With `need_values` every row must carry a value column; otherwise it is
/// optional and dropped.
pub fn read_data<R: Read>(
    reader: R,
    format: DataFormat,
    d: usize,
    need_values: bool,
) -> Result<DataSet> {
    if format == DataFormat::LonLat && d != 3 {
        return Err(Error::Unsupported(format!(
            "lon/lat data needs d = 3, got d = {d}"
        )));
    }
    let ncoord = match format {
        DataFormat::Cartesian => d,
        DataFormat::LonLat => 2,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header_len = rdr
        .headers()
        .map_err(|e| Error::Parse(format!("header: {e}")))?
        .len();
    let mut points = Vec::new();
    let mut values = Vec::new();
    let mut with_values = None;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue;
        }
        let has_value = match rec.len() {
            n if n == ncoord + 1 => true,
            n if n == ncoord && !need_values => false,
            n => {
                let want = if need_values {
                    format!("{}", ncoord + 1)
                } else {
                    format!("{ncoord} or {}", ncoord + 1)
                };
                return Err(Error::Parse(format!(
                    "line {line}: expected {want} columns, found {n}"
                )));
            }
        };
        if *with_values.get_or_insert(has_value) != has_value {
            return Err(Error::Parse(format!(
                "line {line}: inconsistent number of columns"
            )));
        }
        let nums = (0..rec.len())
            .map(|c| parse_field(&rec[c], line, c))
            .collect::<Result<Vec<_>>>()?;
        let x = match format {
            DataFormat::Cartesian => {
                let norm = nums[..d].iter().map(|c| c * c).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > NORM_TOL {
                    return Err(Error::Parse(format!(
                        "line {line}: point has norm {norm}, expected 1 within {NORM_TOL}"
                    )));
                }
                nums[..d].to_vec()
            }
            DataFormat::LonLat => {
                if nums[1].abs() > 90.0 {
                    return Err(Error::Parse(format!(
                        "line {line}: latitude {} outside [-90, 90]",
                        nums[1]
                    )));
                }
                lonlat_to_unit(nums[0], nums[1]).to_vec()
            }
        };
        points.push(x);
        if has_value {
            values.push(nums[ncoord]);
        }
    }
    if points.is_empty() && header_len > 0 && header_len != ncoord && header_len != ncoord + 1 {
        return Err(Error::Parse(format!(
            "header has {header_len} columns, expected {ncoord} or {}",
            ncoord + 1
        )));
    }
    let values = (with_values == Some(true)).then_some(values);
    if need_values && values.is_none() {
        return Err(Error::Parse("data file has no rows".into()));
    }
    Ok(DataSet { d, points, values })
}

pub fn read_data_file(
    path: &Path,
    format: DataFormat,
    d: usize,
    need_values: bool,
) -> Result<DataSet> {
    let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_data(BufReader::new(f), format, d, need_values)
}

/// Reads the `p x p` smoothing weight block: one column (the diagonal) or `p` columns.
pub fn read_weights<R: Read>(reader: R, p: usize) -> Result<DMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        rows.push(
            (0..rec.len())
                .map(|c| parse_field(&rec[c], line, c))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    if rows.len() != p {
        return Err(Error::Parse(format!(
            "weights: expected {p} rows, found {}",
            rows.len()
        )));
    }
    let width = rows.first().map_or(1, Vec::len);
    if width == 1 {
        return Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            p,
            rows.into_iter().map(|r| r[0]),
        )));
    }
    if width != p {
        return Err(Error::Parse(format!(
            "weights: expected 1 or {p} columns, found {width}"
        )));
    }
    Ok(DMatrix::from_row_iterator(p, p, rows.into_iter().flatten()))
}

/// Plain decimal text for a float, shortest form that reads back exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Writes `x_1..x_d,prediction` rows.
pub fn write_predictions<W: Write>(
    writer: W,
    points: &[Vec<f64>],
    preds: &[f64],
    d: usize,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    header.push("prediction".into());
    w.write_record(&header)
        .map_err(|e| Error::Io(e.to_string()))?;
    for (x, s) in points.iter().zip(preds) {
        let row: Vec<String> = x
            .iter()
            .chain(std::iter::once(s))
            .map(|v| fmt_f64(*v))
            .collect();
        w.write_record(&row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    spec: KernelSpec,
    basis_id: String,
    series_tol: f64,
    centers: Vec<Vec<f64>>,
    a: Vec<f64>,
    b: Vec<f64>,
}

pub fn write_model<W: Write>(writer: W, model: &SplineModel) -> Result<()> {
    let file = ModelFile {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        spec: model.spec,
        basis_id: model.basis.id(),
        series_tol: model.series_tol,
        centers: model.centers.points.clone(),
        a: model.a.clone(),
        b: model.b.clone(),
    };
    let mut w = BufWriter::new(writer);
    serde_json::to_writer_pretty(&mut w, &file).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn read_model<R: Read>(reader: R) -> Result<SplineModel> {
    let file: ModelFile = serde_json::from_reader(BufReader::new(reader))
        .map_err(|e| Error::Parse(format!("model file: {e}")))?;
    if file.format != MODEL_FORMAT {
        return Err(Error::Parse(format!(
            "model file: unexpected format tag {:?}",
            file.format
        )));
    }
    if file.version != MODEL_VERSION {
        return Err(Error::Parse(format!(
            "model file: unsupported version {}",
            file.version
        )));
    }
    let spec = file.spec;
    spec.validate()?;
    let basis = TrendBasis::new(spec.d, spec.ell)?;
    if basis.id() != file.basis_id {
        return Err(Error::Parse(format!(
            "model file: basis {:?} does not match spec ({:?})",
            file.basis_id,
            basis.id()
        )));
    }
    let n = file.centers.len();
    if file.a.len() != n || file.b.len() != basis.dim() {
        return Err(Error::Parse(format!(
            "model file: {n} centers with {} kernel and {} trend coefficients (expected {})",
            file.a.len(),
            file.b.len(),
            basis.dim()
        )));
    }
    if file.a.iter().chain(&file.b).any(|v| !v.is_finite()) {
        return Err(Error::Parse("model file: non-finite coefficient".into()));
    }
    for (i, c) in file.centers.iter().enumerate() {
        if c.len() != spec.d {
            return Err(Error::Parse(format!(
                "model file: center {i} has {} coordinates, expected {}",
                c.len(),
                spec.d
            )));
        }
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Parse(format!(
                "model file: center {i} is not a unit vector"
            )));
        }
    }
    Ok(SplineModel {
        spec,
        centers: PointSet {
            d: spec.d,
            points: file.centers,
        },
        a: file.a,
        b: file.b,
        basis,
        series_tol: file.series_tol,
    })
}

pub fn write_model_file(path: &Path, model: &SplineModel) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_model(f, model)
}

pub fn read_model_file(path: &Path) -> Result<SplineModel> {
    let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_model(f)
}
