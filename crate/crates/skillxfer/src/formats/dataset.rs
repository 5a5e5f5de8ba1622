//! Windowed datasets as CSV: the ten attributes in index order, then `ID`,
//! with state names as cell values.

use skillxfer_core::behavior::DataSet;

use crate::{CliError, Result};

pub fn write_csv(ds: &DataSet) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(ds.variables().iter().map(|v| v.name.as_str()))
        .expect("in-memory CSV");
    for row in ds.rows() {
        w.write_record(
            row.iter()
                .zip(ds.variables())
                .map(|(&x, v)| v.states[usize::from(x)].as_str()),
        )
        .expect("in-memory CSV");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("names are UTF-8")
}

pub fn read_csv(text: &str) -> Result<DataSet> {
    let mut ds = DataSet::behavior();
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| CliError::data(format!("dataset header: {e}")))?;
    let expected: Vec<&str> = ds.variables().iter().map(|v| v.name.as_str()).collect();
    if header.iter().ne(expected.iter().copied()) {
        return Err(CliError::data(format!(
            "dataset header is {:?}, expected {:?}",
            header.iter().collect::<Vec<_>>(),
            expected
        )));
    }
    let mut row = vec![0u8; ds.n_vars()];
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| CliError::data(format!("dataset line {line}: {e}")))?;
        for (slot, (cell, var)) in row.iter_mut().zip(rec.iter().zip(ds.variables())) {
            *slot = var.state_index(cell).ok_or_else(|| {
                CliError::data(format!("dataset line {line}: {cell:?} is not a state of {}", var.name))
            })?;
        }
        ds.push_row(&row)?;
    }
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut ds = DataSet::behavior();
        ds.push_row(&[1, 0, 0, 1, 0, 1, 0, 2, 0, 0, 1]).unwrap();
        ds.push_row(&[0; 11]).unwrap();
        let text = write_csv(&ds);
        assert!(text.starts_with(
            "fighting,obstacle,riding_hrs,facing_sol,climbing,location,facing_prs,movement,listening,attack_civ,ID\n\
             occurred,absent,absent,occurred,absent,outdoor,absent,run,absent,absent,ID2\n"
        ));
        assert_eq!(read_csv(&text).unwrap(), ds);
    }

    #[test]
    fn rejects_unknown_states_and_headers() {
        let ds = DataSet::behavior();
        let text = write_csv(&ds);
        assert!(read_csv(&text.replace("ID", "class")).is_err());
        let bad = format!("{text}maybe,absent,absent,absent,absent,indoor,absent,none,absent,absent,ID1\n");
        assert!(read_csv(&bad).is_err());
    }
}
