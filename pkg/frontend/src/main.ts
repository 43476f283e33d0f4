import { ApiClient } from "./api";
import { render } from "./render";
import { SessionStore } from "./store";

const root = document.getElementById("app");
if (root === null) throw new Error("missing #app mount point");

const store = new SessionStore(new ApiClient(""));
store.subscribe(() => render(root, store));
render(root, store);
