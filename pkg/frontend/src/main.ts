import { createApp } from "./app.js";

// Served from the dxsim service's --static-dir, so the API shares the origin.
document.addEventListener("DOMContentLoaded", () => {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  void createApp(root, window.location.origin).start();
});
