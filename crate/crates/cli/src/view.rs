use hnet::{HnetError, NetworkGraph};

const TEMPLATE: &str = include_str!("../assets/viewer.html");
const PLACEHOLDER: &str = "__HNET_GRAPH_JSON__";

/// Fills the bundled viewer page with `g`. `<` only occurs inside JSON
/// strings, so escaping it keeps `</script>` from ending the data block.
pub(crate) fn render(g: &NetworkGraph) -> Result<String, HnetError> {
    g.validate()?;
    let json = String::from_utf8(g.to_json()?).expect("serde_json writes UTF-8");
    let inline = json.replace('<', "\\u003c");
    Ok(TEMPLATE.replacen(PLACEHOLDER, &inline, 1))
}
