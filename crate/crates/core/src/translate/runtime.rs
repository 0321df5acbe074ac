//! The runtime ruleset: two union rules and seven optional rules, written as
//! backward rules. The engine provides union and optional natively and
//! skips these rules on load; the file is an interchange artifact.

use crate::n3::{parse_n3, serialize_n3, N3Doc};

const SOURCE: &str = r#"
{?x sin3:union ?y} <= {?__closure log:includes ?x}.
{?x sin3:union ?y} <= {?__closure log:includes ?y}.
{?m sin3:optional ?o} <= {(?m ?o) sin3:eval (?xp ?xi). ?xp log:includes ?xi}.
{(?m ?o) sin3:eval (?zp ?zi)} <= {?m sin3:unnest (?xp ?xi). ?o sin3:unnest (?yp ?yi). ((?xp ?xi) (?yp ?yi)) sin3:leftjoin (?zp ?zi)}.
{?x sin3:unnest (?yp ?yi)} <= {?x log:equalTo {?m sin3:optional ?o}. (?m ?o) sin3:eval (?yp ?yi)}.
{?x sin3:unnest (?x {})} <= {?x log:notEqualTo {?m sin3:optional ?o}}.
{((?mp ?mi) (?op ?oi)) sin3:leftjoin (?rp ?ri)} <= {(?mp ?op) log:conjunction ?rp. ?rp log:copy ?ri. ?__closure log:includes ?ri. ?ri log:includes ?mi. ?ri log:includes ?oi}.
{((?mp ?mi) (?op ?oi)) sin3:leftjoin (?mp ?ri)} <= {?mp log:copy ?ri. ?__closure log:includes ?ri. (?mp ?op) log:conjunction ?cp. ?cp log:copy ?ci. ?ci log:includes ?ri. ?__closure log:notIncludes ?ci}.
{((?mp ?mi) (?op ?oi)) sin3:leftjoin ({} {})} <= {?__closure log:notIncludes ?mp}.
"#;

fn full() -> N3Doc {
    let mut text = String::new();
    for (p, ns) in crate::n3::vocab::STANDARD_PREFIXES {
        text.push_str(&format!("@prefix {p}: <{ns}>.\n"));
    }
    text.push_str(SOURCE);
    parse_n3(&text).expect("runtime rules parse")
}

/// All nine runtime rules.
pub fn runtime_rules() -> N3Doc {
    full()
}

/// The two union rules only.
pub fn union_rules() -> N3Doc {
    let mut doc = full();
    doc.rules.truncate(2);
    doc
}

/// The shipped `runtime.n3` file.
pub const RUNTIME_N3: &str = include_str!("../../assets/runtime.n3");

/// Text written for `translate --runtime`.
pub fn runtime_text(emit_figure1: bool) -> String {
    serialize_n3(&if emit_figure1 { runtime_rules() } else { union_rules() })
}
