import { createClient, exportFilename } from "./api.js";
import { ReviewController } from "./controller.js";
import { render } from "./render.js";

const api = createClient();
const controller = new ReviewController(api);
const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app mount point");
}

controller.onChange(() => render(controller.state, controller.progress(), root));

async function downloadExport(): Promise<void> {
  const text = await api.getExport();
  const blob = new Blob([text], { type: "text/tab-separated-values" });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = exportFilename(new Date());
  anchor.click();
  URL.revokeObjectURL(url);
}

document.addEventListener("keydown", (event) => {
  if (event.ctrlKey || event.metaKey || event.altKey) return;
  if (event.key === "e") {
    void downloadExport();
    return;
  }
  const handled = controller.handleKey(event.key);
  if (handled !== undefined || ["a", "r", "x", "u", "s", "j", "k", "n", "q"].includes(event.key)) {
    event.preventDefault();
  }
});

void controller.loadTargets();
