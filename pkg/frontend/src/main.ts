import { StoreClient } from "./api.js";
import { App } from "./view.js";

const root = document.getElementById("app");
if (root) {
  void new App(root, new StoreClient("")).load();
}
