import { DEFAULT_BACKEND_URL } from "./background";

const input = document.getElementById("backend-url") as HTMLInputElement;
const status = document.getElementById("status") as HTMLElement;
const form = document.getElementById("options-form") as HTMLFormElement;

void chrome.storage.sync
  .get({ backendUrl: DEFAULT_BACKEND_URL })
  .then((stored) => {
    input.value = stored.backendUrl as string;
  });

form.addEventListener("submit", (event) => {
  event.preventDefault();
  const backendUrl = input.value.trim() || DEFAULT_BACKEND_URL;
  void chrome.storage.sync.set({ backendUrl }).then(() => {
    status.textContent = "Saved.";
    setTimeout(() => (status.textContent = ""), 1500);
  });
});
