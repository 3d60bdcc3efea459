import { ApiClient } from "./api.js";
import { Dashboard } from "./app.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");
const dashboard = new Dashboard(root, new ApiClient(""));
void dashboard.init().then(() => dashboard.startPolling());
