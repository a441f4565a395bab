import { backendUrlFromStorage, isRefineMessage, relayRefinement } from "./background";
import { RelayResponse } from "./types";

chrome.runtime.onMessage.addListener(
  (message: unknown, _sender, sendResponse: (response: RelayResponse) => void) => {
    if (!isRefineMessage(message)) return false;
    void (async () => {
      const backendUrl = await backendUrlFromStorage();
      sendResponse(await relayRefinement(message.payload, backendUrl));
    })();
    return true; // keep the channel open for the async response
  },
);
