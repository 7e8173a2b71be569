//! Rating ingestion, bundled datasets and result serialization.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::recode::{generated_labels, RatingMatrix, RecodedMatrix, RecodingKind};
use crate::variants::{VariantConfig, VariantResult};

pub const BUILTIN_NAMES: [&str; 3] = ["toy", "crimes", "crimes_no_homicide"];

const TOY: [[u32; 3]; 4] = [[2, 4, 5], [3, 3, 1], [2, 1, 4], [1, 5, 3]];

const CRIME_LABELS: [&str; 8] = [
    "Arson",
    "Burglary",
    "Counterfeiting",
    "Forgery",
    "Homicide",
    "Kidnapping",
    "Mugging",
    "Receiving stolen goods",
];

// Perceived seriousness of crimes, 1 = somewhat serious .. 4 = extremely serious.
const CRIMES: [[u32; 8]; 17] = [
    [4, 2, 2, 2, 4, 3, 3, 1],
    [4, 2, 2, 2, 4, 4, 3, 1],
    [3, 2, 2, 2, 4, 3, 3, 1],
    [4, 3, 2, 2, 4, 4, 4, 3],
    [4, 3, 2, 2, 4, 4, 3, 2],
    [4, 3, 3, 2, 4, 4, 3, 2],
    [4, 1, 2, 2, 4, 4, 2, 1],
    [4, 4, 2, 2, 4, 4, 3, 2],
    [3, 2, 1, 2, 4, 4, 3, 1],
    [4, 3, 3, 3, 4, 4, 3, 2],
    [4, 2, 3, 3, 4, 4, 4, 1],
    [4, 4, 3, 3, 4, 4, 4, 2],
    [4, 3, 3, 2, 4, 4, 3, 1],
    [4, 2, 2, 2, 4, 3, 3, 1],
    [4, 2, 1, 1, 4, 4, 2, 1],
    [3, 2, 2, 2, 4, 3, 3, 1],
    [3, 2, 2, 2, 4, 4, 3, 2],
];

const HOMICIDE: usize = 4;

/// Where ratings come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataSource {
    BuiltIn(String),
    FilePath(std::path::PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetDescriptor {
    pub source: DataSource,
    /// Scale maximum; for built-in data `None` keeps the bundled value.
    pub scale_max: Option<u32>,
    pub has_header: bool,
    pub id_column: Option<String>,
}

impl DatasetDescriptor {
    /// Parses `builtin:<name>` or a file path.
    pub fn parse(arg: &str) -> Self {
        let source = match arg.strip_prefix("builtin:") {
            Some(name) => DataSource::BuiltIn(name.to_string()),
            None => DataSource::FilePath(arg.into()),
        };
        DatasetDescriptor {
            source,
            scale_max: None,
            has_header: false,
            id_column: None,
        }
    }

    pub fn load(&self) -> Result<RatingMatrix> {
        match &self.source {
            DataSource::BuiltIn(name) => {
                let r = builtin(name)?;
                match self.scale_max {
                    Some(q) if q != r.q() => {
                        RatingMatrix::new(r.rows(), q, r.row_labels().to_vec(), r.col_labels().to_vec())
                    }
                    _ => Ok(r),
                }
            }
            DataSource::FilePath(path) => {
                let q = self.scale_max.ok_or_else(|| {
                    Error::InvalidMatrix("a scale maximum is required for file input".into())
                })?;
                load_csv(path, q, self.has_header, self.id_column.as_deref())
            }
        }
    }
}

pub fn builtin(name: &str) -> Result<RatingMatrix> {
    match name {
        "toy" => RatingMatrix::unlabeled(TOY.iter().map(|r| r.to_vec()).collect(), 5),
        "crimes" => crimes(),
        "crimes_no_homicide" => {
            let keep: Vec<usize> = (0..CRIME_LABELS.len()).filter(|&j| j != HOMICIDE).collect();
            crimes()?.select_cols(&keep)
        }
        other => Err(Error::UnknownDataset(other.to_string())),
    }
}

fn crimes() -> Result<RatingMatrix> {
    RatingMatrix::new(
        CRIMES.iter().map(|r| r.to_vec()).collect(),
        4,
        (1..=CRIMES.len()).map(|i| i.to_string()).collect(),
        CRIME_LABELS.iter().map(|s| s.to_string()).collect(),
    )
}

/// Reads integer ratings from a comma-separated file.
///
/// With a header, its cells name the objects; `id_column` names a header
/// column that holds respondent labels instead of ratings.
pub fn load_csv(
    path: impl AsRef<Path>,
    q: u32,
    has_header: bool,
    id_column: Option<&str>,
) -> Result<RatingMatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text, q, has_header, id_column)
}

pub fn parse_csv(text: &str, q: u32, has_header: bool, id_column: Option<&str>) -> Result<RatingMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut records = reader.records();
    let mut id_pos = None;
    let mut names: Option<Vec<String>> = None;
    if has_header {
        let header = match records.next() {
            Some(rec) => rec.map_err(|e| csv_error(&e))?,
            None => {
                return Err(Error::MalformedCsv {
                    line: 1,
                    reason: "empty file".into(),
                })
            }
        };
        let mut cells: Vec<String> = header.iter().map(str::to_string).collect();
        if let Some(id) = id_column {
            let pos = cells
                .iter()
                .position(|c| c == id)
                .ok_or_else(|| Error::MalformedCsv {
                    line: 1,
                    reason: format!("no column named {id:?}"),
                })?;
            cells.remove(pos);
            id_pos = Some(pos);
        }
        names = Some(cells);
    } else if id_column.is_some() {
        return Err(Error::InvalidMatrix("an id column requires a header row".into()));
    }

    let mut rows = Vec::new();
    let mut ids = Vec::new();
    let mut width = None;
    for rec in records {
        let rec = rec.map_err(|e| csv_error(&e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if *width.get_or_insert(rec.len()) != rec.len() {
            return Err(Error::MalformedCsv {
                line,
                reason: format!("expected {} cells, found {}", width.unwrap_or(0), rec.len()),
            });
        }
        let mut row = Vec::with_capacity(rec.len());
        for (pos, cell) in rec.iter().enumerate() {
            if Some(pos) == id_pos {
                ids.push(cell.to_string());
                continue;
            }
            let value: i64 = cell.parse().map_err(|_| Error::MalformedCsv {
                line,
                reason: format!("{cell:?} is not an integer"),
            })?;
            if value < 1 || value > i64::from(q) {
                return Err(Error::RatingOutOfRange {
                    row: rows.len(),
                    col: row.len(),
                    value,
                    q,
                });
            }
            row.push(value as u32);
        }
        rows.push(row);
    }

    let p = rows.first().map_or(0, Vec::len);
    if let Some(names) = &names {
        if names.len() != p && !rows.is_empty() {
            return Err(Error::MalformedCsv {
                line: 1,
                reason: format!("header has {} names for {p} rating columns", names.len()),
            });
        }
    }
    let row_labels = if id_pos.is_some() {
        ids
    } else {
        generated_labels("ind", rows.len())
    };
    let col_labels = names.unwrap_or_else(|| generated_labels("obj", p));
    RatingMatrix::new(rows, q, row_labels, col_labels)
}

fn csv_error(e: &csv::Error) -> Error {
    Error::MalformedCsv {
        line: e.position().map_or(0, |p| p.line()),
        reason: e.to_string(),
    }
}

/// Ratings as CSV with an `id` column and a header row.
pub fn ratings_to_csv(r: &RatingMatrix) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["id".to_string()];
    header.extend(r.col_labels().iter().cloned());
    w.write_record(&header).expect("in-memory write");
    for i in 0..r.n() {
        let mut rec = vec![r.row_labels()[i].clone()];
        rec.extend(r.row(i).iter().map(u32::to_string));
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf8")
}

/// Re-coded table as CSV with a `label` column; values in shortest exact form.
pub fn recoded_to_csv(m: &RecodedMatrix) -> String {
    labeled_matrix_csv(m.data(), m.row_labels(), m.col_labels())
}

pub fn labeled_matrix_csv(m: &Matrix, rows: &[String], cols: &[String]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["label".to_string()];
    header.extend(cols.iter().cloned());
    w.write_record(&header).expect("in-memory write");
    for (i, label) in rows.iter().enumerate().take(m.rows()) {
        let mut rec = vec![label.clone()];
        rec.extend(m.row(i).iter().map(|x| format!("{x}")));
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf8")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Seventeen significant digits, enough to round-trip any double.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct CoordinateRecord<'a> {
    label: &'a str,
    dims: &'a [f64],
}

#[derive(Serialize)]
struct Coordinates<'a> {
    rows_standard: Vec<CoordinateRecord<'a>>,
    rows_principal: Vec<CoordinateRecord<'a>>,
    cols_standard: Vec<CoordinateRecord<'a>>,
    cols_principal: Vec<CoordinateRecord<'a>>,
}

#[derive(Serialize)]
struct ResultDocument<'a> {
    variant: &'static str,
    k: usize,
    q: u32,
    drop_degenerate: bool,
    dropped: &'a [String],
    recodings: Vec<RecodingKind>,
    singular_values: &'a [f64],
    explained: &'a [f64],
    cumulative: &'a [f64],
    coordinates: Coordinates<'a>,
}

fn records<'a>(m: &'a Matrix, labels: &'a [String]) -> Vec<CoordinateRecord<'a>> {
    labels
        .iter()
        .enumerate()
        .map(|(i, label)| CoordinateRecord {
            label,
            dims: m.row(i),
        })
        .collect()
}

/// Coordinate sets in output order.
fn coordinate_sets(res: &VariantResult) -> [(&'static str, &Matrix, &[String]); 4] {
    let sol = &res.solution;
    [
        ("rows_standard", &sol.row_standard, &sol.row_labels),
        ("rows_principal", &sol.row_principal, &sol.row_labels),
        ("cols_standard", &sol.col_standard, &sol.col_labels),
        ("cols_principal", &sol.col_principal, &sol.col_labels),
    ]
}

pub fn serialize_result(res: &VariantResult, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Json => result_json(res),
        OutputFormat::Csv => result_csv(res),
    }
}

fn result_json(res: &VariantResult) -> Vec<u8> {
    let sol = &res.solution;
    let VariantConfig {
        variant,
        k,
        drop_degenerate,
    } = res.config;
    let [rs, rp, cs, cp] = coordinate_sets(res);
    let doc = ResultDocument {
        variant: variant.name(),
        k,
        q: res.ratings.q(),
        drop_degenerate,
        dropped: &res.dropped,
        recodings: res.recodings.iter().map(RecodedMatrix::kind).collect(),
        singular_values: &sol.singular_values,
        explained: &sol.explained,
        cumulative: &sol.cumulative_explained,
        coordinates: Coordinates {
            rows_standard: records(rs.1, rs.2),
            rows_principal: records(rp.1, rp.2),
            cols_standard: records(cs.1, cs.2),
            cols_principal: records(cp.1, cp.2),
        },
    };
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17Formatter::default());
    doc.serialize(&mut ser).expect("in-memory serialization");
    out.push(b'\n');
    out
}

fn result_csv(res: &VariantResult) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["set".to_string(), "label".to_string()];
    header.extend((1..=res.config.k).map(|d| format!("dim{d}")));
    w.write_record(&header).expect("in-memory write");
    for (set, m, labels) in coordinate_sets(res) {
        for (i, label) in labels.iter().enumerate() {
            let mut rec = vec![set.to_string(), label.clone()];
            rec.extend(m.row(i).iter().map(|&x| format_real(x)));
            w.write_record(&rec).expect("in-memory write");
        }
    }
    w.into_inner().expect("in-memory write")
}

/// Pretty JSON with every float written to 17 significant digits.
#[derive(Default)]
struct Sig17Formatter<'a>(PrettyFormatter<'a>);

impl Formatter for Sig17Formatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_real(value).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so a failed run never leaves a partial file behind.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_shapes() {
        let toy = builtin("toy").unwrap();
        assert_eq!((toy.n(), toy.p(), toy.q()), (4, 3, 5));
        assert_eq!(toy.row(3), &[1, 5, 3]);
        let crimes = builtin("crimes").unwrap();
        assert_eq!((crimes.n(), crimes.p(), crimes.q()), (17, 8, 4));
        assert!((0..17).all(|i| crimes.get(i, HOMICIDE) == 4));
        assert_eq!(crimes.col_labels()[HOMICIDE], "Homicide");
        let reduced = builtin("crimes_no_homicide").unwrap();
        assert_eq!(reduced.p(), 7);
        assert!(!reduced.col_labels().iter().any(|l| l == "Homicide"));
        assert!(matches!(builtin("iris"), Err(Error::UnknownDataset(_))));
    }

    #[test]
    fn csv_with_header_and_ids() {
        let text = "id,a,b,c\nx,1,2,3\ny,3,2,1\n";
        let r = parse_csv(text, 3, true, Some("id")).unwrap();
        assert_eq!(r.row_labels(), &["x", "y"]);
        assert_eq!(r.col_labels(), &["a", "b", "c"]);
        assert_eq!(r.row(1), &[3, 2, 1]);
    }

    #[test]
    fn csv_without_header_gets_generated_labels() {
        let r = parse_csv("1,2\n2,1\n", 2, false, None).unwrap();
        assert_eq!(r.row_labels(), &["ind_1", "ind_2"]);
        assert_eq!(r.col_labels(), &["obj_1", "obj_2"]);
    }

    #[test]
    fn csv_errors() {
        assert!(matches!(
            parse_csv("1,2\n5,1\n", 4, false, None),
            Err(Error::RatingOutOfRange {
                row: 1,
                col: 0,
                value: 5,
                q: 4
            })
        ));
        assert!(matches!(
            parse_csv("1,2\n3,1,2\n", 4, false, None),
            Err(Error::MalformedCsv { line: 2, .. })
        ));
        assert!(matches!(
            parse_csv("1,2\n3,x\n", 4, false, None),
            Err(Error::MalformedCsv { line: 2, .. })
        ));
        assert!(matches!(
            parse_csv("1,2\n3,2.5\n", 4, false, None),
            Err(Error::MalformedCsv { .. })
        ));
        assert!(matches!(
            parse_csv("1\n2\n", 4, false, None),
            Err(Error::InvalidMatrix(_))
        ));
    }

    #[test]
    fn ratings_csv_round_trip() {
        for name in BUILTIN_NAMES {
            let r = builtin(name).unwrap();
            let back = parse_csv(&ratings_to_csv(&r), r.q(), true, Some("id")).unwrap();
            assert_eq!(back, r);
        }
    }

    #[test]
    fn real_formatting_round_trips() {
        for x in [0.1, -1.0 / 3.0, 6.02e23, 0.0, 1e-300] {
            let s = format_real(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(format_real(0.5), "5.0000000000000000e-1");
    }
}
