use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::time::Duration;

use ei_core::View;
use log::debug;
use scraper::{Html, Selector};
use serde::{Deserialize, Serialize};
use url::Url;

use crate::http::Client;
use crate::{mock, Action, Edge, HarnessError, Node, Result, SiteModel};

/// Where each view starts and the token it presents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewLogin {
    pub entry: String,
    #[serde(default)]
    pub token: Option<String>,
}

/// Views to crawl. The public view is always crawled from the root.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CrawlAuth {
    pub views: BTreeMap<View, ViewLogin>,
}

impl CrawlAuth {
    /// Logins for the bundled mock target.
    pub fn mock() -> Self {
        let views = [View::Professor, View::Student]
            .into_iter()
            .map(|v| (v, ViewLogin { entry: mock::entry_point(v).into(), token: mock::token_for(v).map(Into::into) }))
            .collect();
        CrawlAuth { views }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CrawlLimits {
    pub max_depth: usize,
    pub max_pages: usize,
    pub timeout_ms: u64,
}

impl Default for CrawlLimits {
    fn default() -> Self {
        CrawlLimits { max_depth: 16, max_pages: 500, timeout_ms: 10_000 }
    }
}

/// Breadth-first discovery of links and forms, one pass per view. Neighbours
/// are visited in lexicographic order and the model is normalized, so a
/// static site always yields the same model.
pub fn crawl_site(root: &Url, auth: &CrawlAuth, limits: &CrawlLimits) -> Result<SiteModel> {
    if limits.max_depth == 0 || limits.max_pages == 0 {
        return Err(HarnessError::InvalidConfig("crawl limits must be positive".into()));
    }
    let client = Client::new(root, Duration::from_millis(limits.timeout_ms));
    let mut logins: Vec<(View, ViewLogin)> = vec![(View::Public, ViewLogin { entry: root.path().to_string(), token: None })];
    logins.extend(auth.views.iter().filter(|(v, _)| **v != View::Public).map(|(v, l)| (*v, l.clone())));

    let mut model = SiteModel::default();
    let mut fetched: BTreeSet<String> = BTreeSet::new();
    for (view, login) in &logins {
        crawl_view(&client, root, *view, login, limits, &mut model, &mut fetched)?;
    }
    let known: BTreeSet<String> = model.nodes.iter().map(|n| n.path.clone()).collect();
    model.edges.retain(|e| known.contains(&e.from) && known.contains(&e.to));
    // form actions land on the node they post to
    let form_edges: Vec<(String, Action)> =
        model.edges.iter().filter(|e| e.action != Action::Read).map(|e| (e.to.clone(), e.action)).collect();
    for (to, action) in form_edges {
        if let Some(n) = model.nodes.iter_mut().find(|n| n.path == to) {
            n.actions.push(action);
        }
    }
    model.normalize();
    Ok(model)
}

fn crawl_view(
    client: &Client,
    root: &Url,
    view: View,
    login: &ViewLogin,
    limits: &CrawlLimits,
    model: &mut SiteModel,
    fetched: &mut BTreeSet<String>,
) -> Result<()> {
    let token = login.token.as_deref();
    let entry = normalize_path(&login.entry);
    let mut queue = VecDeque::from([(entry.clone(), 0usize)]);
    let mut seen = BTreeSet::from([entry.clone()]);
    while let Some((path, depth)) = queue.pop_front() {
        if fetched.len() >= limits.max_pages {
            model.notes.push(format!("page limit {} reached; {view} crawl truncated", limits.max_pages));
            break;
        }
        let reply = match client.request(&path, Action::Read, token, &[]) {
            Ok(r) => r,
            Err(message) => {
                let url = client.url_for(&path).map(|u| u.to_string()).unwrap_or(path.clone());
                return Err(HarnessError::Unreachable { url, message });
            }
        };
        let is_entry = path == entry;
        match reply.status {
            200..=299 => {}
            401 | 403 if is_entry => return Err(HarnessError::AuthFailed(view)),
            status if is_entry => {
                return Err(HarnessError::Unreachable { url: root.join(&path).map(|u| u.to_string()).unwrap_or(path), message: format!("status {status}") });
            }
            status => {
                model.notes.push(format!("{view}: {path} answered {status}; not modelled"));
                continue;
            }
        }
        if fetched.insert(path.clone()) {
            model.nodes.push(Node { path: path.clone(), view, actions: vec![Action::Read] });
        }
        if is_entry {
            model.entry_points.insert(view, path.clone());
        }
        let page_url = client.url_for(&path).map_err(|message| HarnessError::Unreachable { url: path.clone(), message })?;
        let (links, forms) = extract(&reply.body, &page_url, root);
        debug!("{view} {path}: {} link(s), {} form(s)", links.len(), forms.len());
        for to in &links {
            model.edges.push(Edge { from: path.clone(), to: to.clone(), action: Action::Read });
        }
        for (to, action) in forms {
            model.edges.push(Edge { from: path.clone(), to, action });
        }
        for to in links {
            if seen.contains(&to) {
                continue;
            }
            if depth + 1 > limits.max_depth {
                model.notes.push(format!("depth limit {} reached at {to} ({view})", limits.max_depth));
                continue;
            }
            seen.insert(to.clone());
            if !fetched.contains(&to) {
                queue.push_back((to, depth + 1));
            }
        }
    }
    if !model.entry_points.contains_key(&view) {
        model.notes.push(format!("{view} entry point was not fetched"));
    }
    Ok(())
}

fn normalize_path(p: &str) -> String {
    if p.starts_with('/') {
        p.to_string()
    } else {
        format!("/{p}")
    }
}

fn same_origin(a: &Url, b: &Url) -> bool {
    a.scheme() == b.scheme() && a.host_str() == b.host_str() && a.port_or_known_default() == b.port_or_known_default()
}

/// Sorted, de-duplicated same-origin link paths and `(target, action)` forms.
fn extract(body: &str, page: &Url, root: &Url) -> (Vec<String>, Vec<(String, Action)>) {
    let doc = Html::parse_document(body);
    let a_sel = Selector::parse("a[href]").expect("static selector");
    let form_sel = Selector::parse("form").expect("static selector");
    let action_sel = Selector::parse("input[name=\"_action\"]").expect("static selector");

    let mut links = BTreeSet::new();
    for a in doc.select(&a_sel) {
        if let Some(u) = a.value().attr("href").and_then(|h| page.join(h).ok()) {
            if same_origin(&u, root) {
                links.insert(u.path().to_string());
            }
        }
    }
    let mut forms = BTreeSet::new();
    for f in doc.select(&form_sel) {
        let post = f.value().attr("method").is_some_and(|m| m.eq_ignore_ascii_case("post"));
        let target = match f.value().attr("action") {
            Some(a) => page.join(a).ok(),
            None => Some(page.clone()),
        };
        let Some(target) = target.filter(|u| post && same_origin(u, root)) else { continue };
        for input in f.select(&action_sel) {
            if let Some(action) = input.value().attr("value").and_then(|v| v.parse::<Action>().ok()) {
                if action != Action::Read {
                    forms.insert((target.path().to_string(), action));
                }
            }
        }
    }
    (links.into_iter().collect(), forms.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extracts_links_and_forms() {
        let root = Url::parse("http://h:1/").unwrap();
        let page = root.join("/x/y").unwrap();
        let body = r#"<a href="z">z</a><a href="/a">a</a><a href="http://other/">o</a><a href="/a#top">a</a>
            <form method="POST" action="/x/y"><input type="hidden" name="_action" value="insert"></form>
            <form method="get" action="/s"><input name="_action" value="delete"></form>"#;
        let (links, forms) = extract(body, &page, &root);
        assert_eq!(links, ["/a", "/x/z"]);
        assert_eq!(forms, [("/x/y".to_string(), Action::Insert)]);
    }
}
