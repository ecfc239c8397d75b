# tropical module