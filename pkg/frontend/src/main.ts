import { ForgeClient } from "./api.js";
import { mountApp } from "./app.js";

declare global {
  interface Window {
    GIRT_FORGE_API?: string;
  }
}

const root = document.getElementById("app");
if (root) {
  mountApp(root, new ForgeClient(window.GIRT_FORGE_API ?? ""));
}
