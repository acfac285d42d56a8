//! Data ingestion and the embedded case-study datasets.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::condmoments::Sample;
use crate::error::{Error, Result};

/// Which field of a CSV record holds the observations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    /// 1-based field position; every record is data.
    Index(usize),
    /// Header name; the first record is the header.
    Name(String),
}

impl FromStr for Column {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.parse::<usize>() {
            Ok(0) => Err(Error::domain("column positions start at 1")),
            Ok(k) => Ok(Column::Index(k)),
            Err(_) if !s.is_empty() => Ok(Column::Name(s.to_string())),
            Err(_) => Err(Error::domain("empty column name")),
        }
    }
}

/// Observations read from a text file.
#[derive(Debug, Clone, PartialEq)]
pub struct DataFile {
    pub path: PathBuf,
    pub values: Vec<f64>,
}

impl DataFile {
    /// Read one number per line, or one CSV field per record when `column`
    /// is given.
    pub fn read(path: impl AsRef<Path>, column: Option<&Column>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let values = match column {
            None => parse_values(&text)?,
            Some(c) => parse_csv(&text, c)?,
        };
        Ok(Self {
            path: path.to_path_buf(),
            values,
        })
    }

    pub fn sample(&self) -> Result<Sample> {
        Sample::new(self.values.clone())
    }
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(head, _)| head).trim()
}

fn parse_number(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("'{field}' is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("'{field}' is not finite"),
        });
    }
    Ok(v)
}

/// Parse one observation per line; blank lines and `#` comments are skipped.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if !line.is_empty() {
            values.push(parse_number(line, i + 1)?);
        }
    }
    if values.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no observations found".into(),
        });
    }
    Ok(values)
}

/// Parse one CSV column; lines starting with `#` are skipped.
pub fn parse_csv(text: &str, column: &Column) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut index = match column {
        Column::Index(k) => Some(k - 1),
        Column::Name(_) => None,
    };
    let mut values = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        // A leading record with no numeric field is a header.
        let header = first && record.iter().all(|f| f.parse::<f64>().is_err());
        first = false;
        let k = match (index, column) {
            (Some(_), _) if header => continue,
            (Some(k), _) => k,
            (None, Column::Name(name)) => {
                let k = record
                    .iter()
                    .position(|f| f == name)
                    .ok_or_else(|| Error::Parse {
                        line,
                        message: format!("header has no column '{name}'"),
                    })?;
                index = Some(k);
                continue;
            }
            (None, Column::Index(_)) => unreachable!(),
        };
        let field = record.get(k).ok_or_else(|| Error::Parse {
            line,
            message: format!(
                "record has {} field(s), column {} requested",
                record.len(),
                k + 1
            ),
        })?;
        values.push(parse_number(field, line)?);
    }
    if values.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no observations found".into(),
        });
    }
    Ok(values)
}

/// The two embedded case-study datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fixture {
    /// Failure times (hours) of 20 pressure vessels.
    Vessels,
    /// Average annual rainfall (mm) in India, 1981 to 2011.
    Rainfall,
}

const VESSELS: [f64; 20] = [
    274.00, 1.70, 871.00, 1311.00, 236.00, 458.00, 54.90, 1787.00, 0.75, 776.00, 28.50, 20.80,
    363.00, 1661.00, 828.00, 290.00, 175.00, 970.00, 1278.00, 126.00,
];

const RAINFALL: [f64; 31] = [
    29.3, 23.8, 18.5, 19.0, 23.2, 15.5, 13.2, 10.4, 15.4, 16.0, 14.3, 16.0, 18.2, 25.0, 31.3, 22.9,
    14.3, 16.4, 13.7, 18.4, 7.3, 15.7, 7.6, 25.7, 28.1, 17.7, 1.7, 18.4, 12.0, 7.5, 6.8,
];

impl Fixture {
    pub const ALL: [Fixture; 2] = [Fixture::Vessels, Fixture::Rainfall];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Vessels => "vessels",
            Self::Rainfall => "rainfall",
        }
    }

    /// The observations as recorded.
    pub fn observations(&self) -> &'static [f64] {
        match self {
            Self::Vessels => &VESSELS,
            Self::Rainfall => &RAINFALL,
        }
    }

    /// Whether the Lévy model is fitted to the reciprocals of the recorded
    /// values rather than to the values themselves.
    pub fn uses_reciprocals(&self) -> bool {
        matches!(self, Self::Vessels)
    }

    /// The sample the goodness-of-fit tests are applied to: reciprocal
    /// failure times for `Vessels`, raw rainfall for `Rainfall`.
    pub fn case_study_sample(&self) -> Sample {
        let values = if self.uses_reciprocals() {
            self.observations().iter().map(|x| 1.0 / x).collect()
        } else {
            self.observations().to_vec()
        };
        Sample::new(values).expect("embedded data are finite and non-empty")
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vessels" => Ok(Self::Vessels),
            "rainfall" => Ok(Self::Rainfall),
            _ => Err(Error::domain(format!(
                "unknown fixture '{s}' (expected vessels or rainfall)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_values_with_comments() {
        let text = "# header\n1.5\n\n  2e3 # trailing\n-4\n";
        assert_eq!(parse_values(text).unwrap(), vec![1.5, 2000.0, -4.0]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_values("1\n2\nabc\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                message: "'abc' is not a number".into()
            }
        );
        assert!(matches!(
            parse_values("# nothing\n\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_values("1\nNaN\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn csv_by_index_and_name() {
        let text = "year,mm\n1981,29.3\n# gap\n1982,23.8\n";
        let by_name = parse_csv(text, &"mm".parse().unwrap()).unwrap();
        assert_eq!(by_name, vec![29.3, 23.8]);
        let by_index = parse_csv("1,2\n3,4\n", &Column::Index(2)).unwrap();
        assert_eq!(by_index, vec![2.0, 4.0]);
        let err = parse_csv("1,2\n3\n", &Column::Index(2)).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        assert!(matches!(
            parse_csv(text, &Column::Name("x".into())),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn column_parsing() {
        assert_eq!("3".parse::<Column>().unwrap(), Column::Index(3));
        assert!("0".parse::<Column>().is_err());
        assert_eq!("mm".parse::<Column>().unwrap(), Column::Name("mm".into()));
    }

    #[test]
    fn fixture_sizes_and_names() {
        assert_eq!(Fixture::Vessels.observations().len(), 20);
        assert_eq!(Fixture::Rainfall.observations().len(), 31);
        for f in Fixture::ALL {
            assert_eq!(f.name().parse::<Fixture>().unwrap(), f);
        }
        let s = Fixture::Vessels.case_study_sample();
        assert_eq!(s.values()[0], 1.0 / 274.0);
        assert_eq!(
            Fixture::Rainfall.case_study_sample().values(),
            &RAINFALL[..]
        );
    }
}
