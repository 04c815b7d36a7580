use std::time::Duration;

use ureq::Agent;
use url::Url;

use crate::Action;

/// Thin blocking client: statuses come back as values, only transport
/// failures are errors.
#[derive(Clone)]
pub(crate) struct Client {
    agent: Agent,
    base: Url,
}

pub(crate) struct Reply {
    pub status: u16,
    pub body: String,
}

impl Client {
    pub fn new(base: &Url, timeout: Duration) -> Self {
        let agent: Agent = Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build()
            .into();
        Client { agent, base: base.clone() }
    }

    pub fn url_for(&self, path: &str) -> Result<Url, String> {
        self.base.join(path).map_err(|e| format!("bad path {path}: {e}"))
    }

    /// `read` is a GET; other actions POST a form carrying `_action`.
    pub fn request(
        &self,
        path: &str,
        action: Action,
        token: Option<&str>,
        fields: &[(String, String)],
    ) -> Result<Reply, String> {
        let url = self.url_for(path)?;
        let auth = token.map(|t| format!("Bearer {t}"));
        let result = if action == Action::Read {
            let mut req = self.agent.get(url.as_str());
            if let Some(a) = &auth {
                req = req.header("Authorization", a);
            }
            req.call()
        } else {
            let mut req = self.agent.post(url.as_str());
            if let Some(a) = &auth {
                req = req.header("Authorization", a);
            }
            let form = std::iter::once(("_action", action.as_str()))
                .chain(fields.iter().map(|(k, v)| (k.as_str(), v.as_str())));
            req.send_form(form)
        };
        let mut resp = result.map_err(|e| e.to_string())?;
        let status = resp.status().as_u16();
        let body = resp.body_mut().read_to_string().map_err(|e| e.to_string())?;
        Ok(Reply { status, body })
    }
}
