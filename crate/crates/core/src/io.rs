//! Corpus file formats: graph JSON lines and tokenized sentences.

use crate::error::{Error, Result};
use crate::graph::{collapse_preterminals, strip_unsupported, validate, Graph, Token};

/// Normalizes an ingested graph: linkage and implicit units are removed and
/// unary pre-terminals collapsed.
pub fn normalize(g: &Graph) -> Result<Graph> {
    let out = collapse_preterminals(&strip_unsupported(g)?);
    let violations = validate(&out);
    if violations.is_empty() {
        Ok(out)
    } else {
        Err(Error::InvalidGraph {
            id: g.id.clone(),
            violations,
        })
    }
}

/// One JSON graph per non-blank line, normalized on the way in.
pub fn read_graphs(text: &str) -> Result<Vec<Graph>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| Error::Format { line: i + 1, msg };
        let g: Graph = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        out.push(normalize(&g).map_err(|e| bad(e.to_string()))?);
    }
    Ok(out)
}

pub fn write_graphs(graphs: &[Graph]) -> String {
    graphs
        .iter()
        .map(|g| serde_json::to_string(g).expect("graphs serialize") + "\n")
        .collect()
}

/// Blank-line-separated sentences with one `INDEX FORM POS DEP` line per
/// token; an optional `#id` line names the sentence.
pub fn read_tokenized(text: &str) -> Result<Vec<(String, Vec<Token>)>> {
    let mut out: Vec<(String, Vec<Token>)> = Vec::new();
    let mut cur: Option<(String, Vec<Token>)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            out.extend(cur.take());
            continue;
        }
        if let Some(id) = line.strip_prefix('#') {
            out.extend(cur.take());
            cur = Some((id.trim().to_string(), Vec::new()));
            continue;
        }
        let n = out.len();
        let sent = cur.get_or_insert_with(|| ((n + 1).to_string(), Vec::new()));
        let f: Vec<&str> = line.split_whitespace().collect();
        let (idx, form, pos, dep) = match f[..] {
            [i, form] => (i, form, "_", "_"),
            [i, form, pos] => (i, form, pos, "_"),
            [i, form, pos, dep] => (i, form, pos, dep),
            _ => {
                return Err(Error::Format {
                    line: i + 1,
                    msg: format!("expected INDEX FORM POS DEP, got `{line}`"),
                })
            }
        };
        if idx.parse::<usize>().ok() != Some(sent.1.len() + 1) {
            return Err(Error::Format {
                line: i + 1,
                msg: format!("expected token index {}, got `{idx}`", sent.1.len() + 1),
            });
        }
        sent.1.push(Token::new(form, pos, dep));
    }
    out.extend(cur);
    Ok(out)
}

pub fn write_tokenized(sentences: &[(String, Vec<Token>)]) -> String {
    let mut s = String::new();
    for (id, toks) in sentences {
        s.push_str(&format!("#{id}\n"));
        for (i, t) in toks.iter().enumerate() {
            s.push_str(&format!("{} {} {} {}\n", i + 1, t.form, t.pos, t.dep));
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn graphs_round_trip() {
        let gs = vec![fixtures::graduation(), fixtures::gave_up()];
        assert_eq!(read_graphs(&write_graphs(&gs)).unwrap(), gs);
    }

    #[test]
    fn linkage_is_stripped_on_ingestion() {
        let text = write_graphs(&[fixtures::graduation_linkage()]);
        let g = read_graphs(&text).unwrap().remove(0);
        let want = fixtures::graduation();
        assert_eq!((g.nodes.len(), g.edges.len()), (want.nodes.len(), want.edges.len()));
    }

    #[test]
    fn bad_lines_carry_line_numbers() {
        let good = write_graphs(&[fixtures::gave_up()]);
        let text = format!("{good}\nnot json\n");
        assert!(matches!(read_graphs(&text), Err(Error::Format { line: 3, .. })));
        let mut broken = fixtures::gave_up();
        broken.edges.pop();
        let text = format!("{}{}", good, write_graphs(&[broken]));
        match read_graphs(&text) {
            Err(Error::Format { line: 2, msg }) => assert!(msg.contains("invalid"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let unknown = good.replace("\"id\"", "\"extra\":1,\"id\"");
        assert!(read_graphs(&unknown).is_err());
    }

    #[test]
    fn tokenized_round_trip() {
        let text = "#a\n1 John NNP nsubj\n2 left _ _\n\n1 Hi\n";
        let s = read_tokenized(text).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].0, "a");
        assert_eq!(s[1].0, "2");
        assert_eq!(s[0].1[0], Token::new("John", "NNP", "nsubj"));
        assert_eq!(s[1].1[0], Token::bare("Hi"));
        assert_eq!(read_tokenized(&write_tokenized(&s)).unwrap(), s);
        assert!(read_tokenized("").unwrap().is_empty());
        assert!(matches!(
            read_tokenized("1 a\n3 b\n"),
            Err(Error::Format { line: 2, .. })
        ));
    }
}
